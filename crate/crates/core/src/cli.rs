//! Command-line front end: capacity sweeps, oracle validation and vacuum
//! amplitude sweeps, all emitting byte-stable CSV.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::channels::VacuumAmplitudes;
use crate::error::{Error, Result};
use crate::experiment::{CapacityType, ClassicalReadout, Family, Scenario};
use crate::infotheory::OptimizerConfig;
use crate::oracle::{closed_form, list_available, ClosedFormId};
use crate::supermaps::SupermapKind;

pub const CSV_HEADER: &str = "p,configuration,family,capacity_type,value,converged,restarts,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Usage = 1,
    NonConvergence = 2,
    ToleranceUnachievable = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CapacitySelection {
    Classical,
    Quantum,
    Both,
}

impl CapacitySelection {
    fn types(self) -> &'static [CapacityType] {
        match self {
            CapacitySelection::Classical => &[CapacityType::Classical],
            CapacitySelection::Quantum => &[CapacityType::Quantum],
            CapacitySelection::Both => &CapacityType::ALL,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReadoutArg {
    #[default]
    TargetBasis,
    FullHolevo,
}

impl From<ReadoutArg> for ClassicalReadout {
    fn from(r: ReadoutArg) -> Self {
        match r {
            ReadoutArg::TargetBasis => ClassicalReadout::TargetBasis,
            ReadoutArg::FullHolevo => ClassicalReadout::FullHolevo,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qsupermap", version, about = "Capacities of superposed and switched qubit channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity versus p for one configuration and channel family.
    Sweep(SweepArgs),
    /// Compare numerical capacities with every available closed form.
    Validate(ValidateArgs),
    /// Quantum capacity of a superposition of two depolarizing channels per vacuum-amplitude set.
    VacuumSweep(VacuumArgs),
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Optimizer tolerance in bits.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub p_start: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_end: f64,
    #[arg(long, default_value_t = 21)]
    pub p_steps: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: SupermapKind,
    #[arg(long)]
    pub family: Family,
    #[arg(long, value_enum, default_value_t = CapacitySelection::Classical)]
    pub capacity: CapacitySelection,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Vacuum amplitudes for every base channel, comma-separated reals.
    #[arg(long)]
    pub amps: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub classical_readout: ReadoutArg,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Comma-separated p values; defaults to 0, 0.05, ..., 1.
    #[arg(long)]
    pub grid: Option<String>,
    /// Allowed |numeric − closed form| in bits.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Restrict to these configurations.
    #[arg(long, value_delimiter = ',')]
    pub config: Vec<SupermapKind>,
    /// Per-point CSV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VacuumArgs {
    /// One amplitude set per flag, comma-separated reals; defaults to four sets with rising α₀.
    #[arg(long)]
    pub amps: Vec<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub configuration: SupermapKind,
    pub family: Family,
    pub capacity: CapacitySelection,
    pub p_start: f64,
    pub p_end: f64,
    pub p_steps: usize,
    pub amplitudes: Option<VacuumAmplitudes>,
    pub optimizer: OptimizerConfig,
    pub readout: ClassicalReadout,
    pub output_path: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub configuration: SupermapKind,
    pub family: Family,
    pub capacity_type: CapacityType,
    pub value: f64,
    pub converged: bool,
    pub restarts: usize,
    pub seed: u64,
}

/// Formats like C's `%.9g`.
pub fn format_g9(x: f64) -> String {
    const PREC: i32 = 9;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (PREC - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= PREC {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_fraction(&format!("{:.*}", (PREC - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `steps` evenly spaced points from `start` to `end` inclusive.
pub fn p_grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::Domain("p-steps must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || start > end {
        return Err(Error::Domain(format!(
            "need 0 <= p-start <= p-end <= 1, got {start} and {end}"
        )));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let h = (end - start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { end } else { start + i as f64 * h })
        .collect())
}

pub fn default_validation_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Parses comma-separated reals into amplitudes, normalizing when the squared
/// norm is within 1e-6 of one.
pub fn parse_amplitudes(s: &str) -> Result<VacuumAmplitudes> {
    let vals = parse_reals(s)?;
    if vals.is_empty() {
        return Err(Error::Domain("amplitude list is empty".into()));
    }
    let norm2: f64 = vals.iter().map(|a| a * a).sum();
    if (norm2 - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized(norm2));
    }
    let scale = norm2.sqrt().recip();
    VacuumAmplitudes::from_reals(&vals.iter().map(|a| a * scale).collect::<Vec<_>>())
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Domain(format!("`{t}` is not a finite number")))
        })
        .collect()
}

/// Four amplitude sets with α₀ = ½, 1/√2, √3/2 and 1, the rest shared equally.
pub fn default_vacuum_sets() -> Vec<VacuumAmplitudes> {
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    [
        [0.5, 0.5, 0.5, 0.5],
        [1.0 / s2, 1.0 / s6, 1.0 / s6, 1.0 / s6],
        [s3 / 2.0, 0.5 / s3, 0.5 / s3, 0.5 / s3],
        [1.0, 0.0, 0.0, 0.0],
    ]
    .iter()
    .map(|a| VacuumAmplitudes::from_reals(a).expect("normalized by construction"))
    .collect()
}

pub fn amplitude_label(amps: &VacuumAmplitudes) -> String {
    amps.as_slice()
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                format_g9(z.re)
            } else {
                format!("{}{:+}i", format_g9(z.re), format_g9(z.im))
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn optimizer_config(args: &OptimizerArgs) -> OptimizerConfig {
    OptimizerConfig {
        restarts: args.restarts,
        tolerance: args.tol,
        seed: args.seed,
        ..Default::default()
    }
}

/// Evaluates every `(p, capacity_type)` point of a sweep, sorted by p then capacity type.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.optimizer.validate()?;
    let grid = p_grid(spec.p_start, spec.p_end, spec.p_steps)?;
    let jobs: Vec<(f64, CapacityType)> = grid
        .iter()
        .flat_map(|&p| spec.capacity.types().iter().map(move |&c| (p, c)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(p, capacity_type)| {
            let mut scenario = Scenario::new(spec.configuration, spec.family, p);
            if let Some(a) = &spec.amplitudes {
                scenario = scenario.with_amplitudes(a.clone());
            }
            let r = scenario.capacity(capacity_type, spec.readout, &spec.optimizer)?;
            Ok(SweepRow {
                p,
                configuration: spec.configuration,
                family: spec.family,
                capacity_type,
                value: r.value,
                converged: r.converged,
                restarts: spec.optimizer.restarts,
                seed: spec.optimizer.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.capacity_type.cmp(&b.capacity_type)));
    Ok(rows)
}

fn row_fields(r: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        format_g9(r.p),
        r.configuration,
        r.family,
        r.capacity_type,
        format_g9(r.value),
        r.converged,
        r.restarts,
        r.seed
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&row_fields(r));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

/// Runs a sweep and writes its CSV.
pub fn cmd_sweep(spec: &SweepSpec, log: &mut dyn Write) -> Exit {
    let rows = match run_sweep(spec) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return Exit::Usage;
        }
    };
    if let Err(e) = write_file(&spec.output_path, &sweep_csv(&rows)) {
        let _ = writeln!(log, "error: {e}");
        return Exit::Usage;
    }
    let failed = rows.iter().filter(|r| !r.converged).count();
    let _ = writeln!(
        log,
        "wrote {} rows to {}",
        rows.len(),
        spec.output_path.display()
    );
    if failed > 0 {
        let _ = writeln!(log, "{failed} optimizer runs did not converge");
        return Exit::NonConvergence;
    }
    Exit::Ok
}

#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub id: ClosedFormId,
    pub p: f64,
    pub numeric: f64,
    pub closed_form: f64,
    pub converged: bool,
}

impl Deviation {
    pub fn abs_diff(&self) -> f64 {
        (self.numeric - self.closed_form).abs()
    }
}

/// Numerical capacity against the closed form at every `(id, p)`, in id then p order.
pub fn validation_deviations(
    ids: &[ClosedFormId],
    grid: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<Deviation>> {
    let jobs: Vec<(ClosedFormId, f64)> = ids
        .iter()
        .flat_map(|&id| grid.iter().map(move |&p| (id, p)))
        .collect();
    jobs.par_iter()
        .map(|&(id, p)| {
            let scenario = Scenario::new(id.configuration, id.family, p);
            let r = scenario.capacity(id.capacity_type, ClassicalReadout::TargetBasis, cfg)?;
            Ok(Deviation {
                id,
                p,
                numeric: r.value,
                closed_form: closed_form(&id, p)?,
                converged: r.converged,
            })
        })
        .collect()
}

pub fn validation_csv(devs: &[Deviation]) -> String {
    let mut out =
        String::from("configuration,family,capacity_type,p,numeric,closed_form,abs_diff,converged\n");
    for d in devs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            d.id.configuration,
            d.id.family,
            d.id.capacity_type,
            format_g9(d.p),
            format_g9(d.numeric),
            format_g9(d.closed_form),
            format_g9(d.abs_diff()),
            d.converged
        );
    }
    out
}

pub fn cmd_validate(
    grid: &[f64],
    tolerance: f64,
    configs: &[SupermapKind],
    cfg: &OptimizerConfig,
    report: Option<&Path>,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> Exit {
    if grid.is_empty() {
        let _ = writeln!(log, "error: validation grid is empty");
        return Exit::Usage;
    }
    if let Some(&p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        let _ = writeln!(log, "error: grid point {p} is outside [0, 1]");
        return Exit::Usage;
    }
    if !(tolerance > 0.0) {
        let _ = writeln!(log, "error: tolerance must be positive");
        return Exit::Usage;
    }
    let ids: Vec<ClosedFormId> = list_available()
        .into_iter()
        .filter(|id| configs.is_empty() || configs.contains(&id.configuration))
        .collect();
    let devs = match validation_deviations(&ids, grid, cfg) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return Exit::Usage;
        }
    };
    if let Some(path) = report {
        if let Err(e) = write_file(path, &validation_csv(&devs)) {
            let _ = writeln!(log, "error: {e}");
            return Exit::Usage;
        }
    }

    let mut failing = 0;
    for id in &ids {
        let worst = devs
            .iter()
            .filter(|d| d.id == *id)
            .max_by(|a, b| a.abs_diff().total_cmp(&b.abs_diff()))
            .expect("non-empty grid");
        let ok = worst.abs_diff() <= tolerance;
        failing += usize::from(!ok);
        let _ = writeln!(
            out,
            "{} {:<32} worst |Δ| = {:.3e} at p = {}",
            if ok { "ok  " } else { "FAIL" },
            id.to_string(),
            worst.abs_diff(),
            format_g9(worst.p)
        );
    }
    let _ = writeln!(
        out,
        "{} of {} closed forms within {tolerance:e}",
        ids.len() - failing,
        ids.len()
    );
    if failing > 0 {
        Exit::ToleranceUnachievable
    } else {
        Exit::Ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VacuumRow {
    pub row: SweepRow,
    pub label: String,
}

pub fn run_vacuum_sweep(
    sets: &[VacuumAmplitudes],
    grid: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Vec<VacuumRow>> {
    cfg.validate()?;
    if let Some(bad) = sets.iter().find(|a| a.len() != 4) {
        return Err(Error::Domain(format!(
            "depolarizing channels need 4 vacuum amplitudes, got {}",
            bad.len()
        )));
    }
    let jobs: Vec<(usize, f64)> = (0..sets.len())
        .flat_map(|s| grid.iter().map(move |&p| (s, p)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(s, p)| {
            let scenario = Scenario::new(SupermapKind::CoherentSup, Family::Depolarizing, p)
                .with_amplitudes(sets[s].clone());
            let r = scenario.capacity(CapacityType::Quantum, ClassicalReadout::TargetBasis, cfg)?;
            Ok((
                s,
                VacuumRow {
                    row: SweepRow {
                        p,
                        configuration: SupermapKind::CoherentSup,
                        family: Family::Depolarizing,
                        capacity_type: CapacityType::Quantum,
                        value: r.value,
                        converged: r.converged,
                        restarts: cfg.restarts,
                        seed: cfg.seed,
                    },
                    label: amplitude_label(&sets[s]),
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.1.row.p.total_cmp(&b.1.row.p).then(a.0.cmp(&b.0)));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn vacuum_csv(rows: &[VacuumRow]) -> String {
    let mut out = format!("{CSV_HEADER},amplitudes\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", row_fields(&r.row), r.label);
    }
    out
}

pub fn cmd_vacuum_sweep(
    sets: &[VacuumAmplitudes],
    grid: &[f64],
    cfg: &OptimizerConfig,
    path: &Path,
    log: &mut dyn Write,
) -> Exit {
    let rows = match run_vacuum_sweep(sets, grid, cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return Exit::Usage;
        }
    };
    if let Err(e) = write_file(path, &vacuum_csv(&rows)) {
        let _ = writeln!(log, "error: {e}");
        return Exit::Usage;
    }
    let _ = writeln!(log, "wrote {} rows to {}", rows.len(), path.display());
    if rows.iter().any(|r| !r.row.converged) {
        let _ = writeln!(log, "some optimizer runs did not converge");
        return Exit::NonConvergence;
    }
    Exit::Ok
}

fn usage(log: &mut dyn Write, e: &Error) -> Exit {
    let _ = writeln!(log, "error: {e}");
    Exit::Usage
}

/// Parses `args` (including the program name) and runs the chosen subcommand.
pub fn run<I, T>(args: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stderr = &mut io::stderr();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Usage } else { Exit::Ok };
        }
    };
    match cli.command {
        Command::Sweep(a) => {
            let amplitudes = match a.amps.as_deref().map(parse_amplitudes).transpose() {
                Ok(x) => x,
                Err(e) => return usage(stderr, &e),
            };
            let spec = SweepSpec {
                configuration: a.config,
                family: a.family,
                capacity: a.capacity,
                p_start: a.grid.p_start,
                p_end: a.grid.p_end,
                p_steps: a.grid.p_steps,
                amplitudes,
                optimizer: optimizer_config(&a.optimizer),
                readout: a.classical_readout.into(),
                output_path: a.out,
            };
            cmd_sweep(&spec, stderr)
        }
        Command::Validate(a) => {
            let grid = match a.grid.as_deref().map(parse_reals).transpose() {
                Ok(g) => g.unwrap_or_else(default_validation_grid),
                Err(e) => return usage(stderr, &e),
            };
            let cfg = OptimizerConfig {
                restarts: a.restarts,
                seed: a.seed,
                ..Default::default()
            };
            if let Err(e) = cfg.validate() {
                return usage(stderr, &e);
            }
            cmd_validate(
                &grid,
                a.tol,
                &a.config,
                &cfg,
                a.out.as_deref(),
                &mut io::stdout(),
                stderr,
            )
        }
        Command::VacuumSweep(a) => {
            let sets = if a.amps.is_empty() {
                default_vacuum_sets()
            } else {
                match a.amps.iter().map(|s| parse_amplitudes(s)).collect() {
                    Ok(s) => s,
                    Err(e) => return usage(stderr, &e),
                }
            };
            let grid = match p_grid(a.grid.p_start, a.grid.p_end, a.grid.p_steps) {
                Ok(g) => g,
                Err(e) => return usage(stderr, &e),
            };
            cmd_vacuum_sweep(&sets, &grid, &optimizer_config(&a.optimizer), &a.out, stderr)
        }
    }
}
