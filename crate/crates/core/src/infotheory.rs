//! Holevo information, coherent information and one-shot capacities of
//! qubit-input channels.
//!
//! Capacities are maximized with multistart Nelder–Mead. Restart 0 always
//! starts from the canonical point (the `{|0⟩, |1⟩}` ensemble with equal
//! weights, or `𝕀/2` for the quantum capacity); the remaining restarts draw
//! their starting points from a ChaCha8 stream keyed by `(seed, restart)`, so
//! results do not depend on how rayon schedules them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::optimize::{minimize, Minimum, SimplexOptions};
use crate::qmatrix::{
    bloch_matrix, c, hermitian_entropy, sqrt_psd, ComplexMatrix, DensityMatrix, C64, STATE_TOL,
    ZERO,
};

const PURITY_TOL: f64 = 1e-9;

/// Finite ensemble `{(pᵢ, ρᵢ)}` of pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    entries: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return Err(Error::InvalidEnsemble("ensemble is empty".into()));
        };
        let dim = first.dim();
        let mut total = 0.0;
        for (i, (p, rho)) in entries.iter().enumerate() {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidEnsemble(format!("weight {i} is {p}")));
            }
            if rho.dim() != dim {
                return Err(Error::InvalidEnsemble(format!(
                    "state {i} has dimension {}, expected {dim}",
                    rho.dim()
                )));
            }
            let purity = rho.purity();
            if (purity - 1.0).abs() > PURITY_TOL {
                return Err(Error::InvalidEnsemble(format!(
                    "state {i} is not pure (purity {purity})"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    /// `{(½, |0⟩), (½, |1⟩)}`.
    pub fn canonical() -> Self {
        Self {
            entries: vec![
                (0.5, DensityMatrix::basis(2, 0)),
                (0.5, DensityMatrix::basis(2, 1)),
            ],
        }
    }

    pub fn entries(&self) -> &[(f64, DensityMatrix)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].1.dim()
    }
}

/// How classical-capacity ensembles are parametrized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// Up to `ensemble_size` pure states anywhere on the Bloch sphere.
    #[default]
    Bloch,
    /// `{(w, |0⟩), (1 − w, |1⟩)}`; only the prior is optimized.
    ComputationalBasis,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Absolute, in bits. Restarts within this of the best count as agreeing.
    pub tolerance: f64,
    pub seed: u64,
    pub ensemble_size: usize,
    pub encoding: Encoding,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iterations: 2000,
            tolerance: 1e-6,
            seed: 0,
            ensemble_size: 4,
            encoding: Encoding::Bloch,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Domain("restarts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Domain("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(2..=4).contains(&self.ensemble_size) {
            return Err(Error::Domain(format!(
                "ensemble_size must be in [2, 4], got {}",
                self.ensemble_size
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Argmax {
    Ensemble(Ensemble),
    State(DensityMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityResult {
    /// Reported capacity in bits; the quantum capacity is clamped at 0.
    pub value: f64,
    /// Unclamped optimum.
    pub raw_value: f64,
    pub argmax: Argmax,
    /// At least two restarts (or the only one) reached the optimum within tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

/// Choi matrix `J = Σᵢⱼ |i⟩⟨j| ⊗ E(|i⟩⟨j|)`, input factor first.
///
/// Its size does not grow with the Kraus count, which reaches the hundreds
/// for nested depolarizing supermaps.
#[derive(Clone, Debug)]
struct Choi {
    d_in: usize,
    d_out: usize,
    j: ComplexMatrix,
}

impl Choi {
    fn new(ch: &Channel) -> Self {
        let (d_in, d_out) = (ch.d_in(), ch.d_out());
        let n = d_in * d_out;
        let mut j = ComplexMatrix::zeros(n, n);
        for k in ch.kraus() {
            for i in 0..d_in {
                for a in 0..d_out {
                    let kai = k[(a, i)];
                    if kai == ZERO {
                        continue;
                    }
                    for jj in 0..d_in {
                        for b in 0..d_out {
                            j[(i * d_out + a, jj * d_out + b)] += kai * k[(b, jj)].conj();
                        }
                    }
                }
            }
        }
        Self { d_in, d_out, j }
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.d_out;
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..self.d_in {
            for jj in 0..self.d_in {
                let r = rho[(i, jj)];
                if r == ZERO {
                    continue;
                }
                for a in 0..d {
                    for b in 0..d {
                        out[(a, b)] += r * self.j[(i * d + a, jj * d + b)];
                    }
                }
            }
        }
        out
    }

    /// Entropy of `(X ⊗ 𝕀) J (X ⊗ 𝕀)` with `X = √ρᵀ`, the joint reference-output
    /// state of a purification, which equals the exchange entropy.
    fn exchange_entropy(&self, rho: &ComplexMatrix) -> Result<f64> {
        let x = transpose(&sqrt_psd(rho));
        let d = self.d_out;
        let n = self.d_in * d;
        let mut left = ComplexMatrix::zeros(n, n);
        for i in 0..self.d_in {
            for jj in 0..self.d_in {
                for a in 0..d {
                    left[(i * d + a, jj * d + a)] = x[(i, jj)];
                }
            }
        }
        let right = left.dagger();
        hermitian_entropy(&(&(&left * &self.j) * &right))
    }
}

fn transpose(m: &ComplexMatrix) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(m.cols(), m.rows());
    for r in 0..m.rows() {
        for col in 0..m.cols() {
            t[(col, r)] = m[(r, col)];
        }
    }
    t
}

fn check_input(ch: &Channel, dim: usize, what: &str) -> Result<()> {
    if ch.d_in() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} has dimension {dim} but `{}` takes dimension {}",
            ch.label(),
            ch.d_in()
        )));
    }
    Ok(())
}

/// `χ = S(Σ pᵢ E(ρᵢ)) − Σ pᵢ S(E(ρᵢ))` in bits.
pub fn holevo_information(ch: &Channel, ens: &Ensemble) -> Result<f64> {
    check_input(ch, ens.dim(), "ensemble")?;
    let mut avg = ComplexMatrix::zeros(ch.d_out(), ch.d_out());
    let mut conditional = 0.0;
    for (p, rho) in ens.entries() {
        if *p == 0.0 {
            continue;
        }
        let out = ch.apply_matrix(rho.matrix())?;
        conditional += p * hermitian_entropy(&out)?;
        avg.add_assign_checked(&out.scale_real(*p))?;
    }
    Ok((hermitian_entropy(&avg)? - conditional).max(0.0))
}

/// Environment state `W_ab = Tr(K_a ρ K_b†)` of the Stinespring dilation
/// built from the channel's Kraus operators.
pub fn complementary_output(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_input(ch, rho.dim(), "state")?;
    let kraus = ch.kraus();
    let k_rho: Vec<ComplexMatrix> = kraus
        .iter()
        .map(|k| k.matmul(rho.matrix()))
        .collect::<Result<_>>()?;
    let n = kraus.len();
    let mut w = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            // Tr(K_a ρ K_b†) = Σ_rc (K_a ρ)_rc conj((K_b)_rc)
            let v: C64 = k_rho[a]
                .as_slice()
                .iter()
                .zip(kraus[b].as_slice())
                .map(|(x, y)| x * y.conj())
                .sum();
            w[(a, b)] = v;
            w[(b, a)] = v.conj();
        }
    }
    Ok(DensityMatrix::from_trusted(w))
}

/// Entropy of the complementary output. Uses the Kraus-indexed environment
/// when it is the smaller matrix and the Choi route otherwise; both give the
/// same nonzero spectrum.
pub fn exchange_entropy(ch: &Channel, rho: &DensityMatrix) -> Result<f64> {
    check_input(ch, rho.dim(), "state")?;
    if ch.kraus_count() <= ch.d_in() * ch.d_out() {
        hermitian_entropy(complementary_output(ch, rho)?.matrix())
    } else {
        Choi::new(ch).exchange_entropy(rho.matrix())
    }
}

/// `I_c = S(E(ρ)) − S(E^c(ρ))` in bits; may be negative.
pub fn coherent_information(ch: &Channel, rho: &DensityMatrix) -> Result<f64> {
    check_input(ch, rho.dim(), "state")?;
    let out = ch.apply_matrix(rho.matrix())?;
    Ok(hermitian_entropy(&out)? - exchange_entropy(ch, rho)?)
}

fn require_qubit_input(ch: &Channel) -> Result<()> {
    if ch.d_in() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "capacities are defined here for qubit inputs; `{}` takes dimension {}",
            ch.label(),
            ch.d_in()
        )));
    }
    Ok(())
}

fn ket_matrix(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, co) = (0.5 * theta).sin_cos();
    let k = ComplexMatrix::ket(&[c(co, 0.0), C64::from_polar(s, phi)]);
    &k * &k.dagger()
}

/// Decoded ensemble: weights and pure-state projectors.
fn decode_ensemble(x: &[f64], encoding: Encoding) -> Vec<(f64, ComplexMatrix)> {
    match encoding {
        Encoding::ComputationalBasis => {
            let w = x[0].sin().powi(2);
            vec![(w, ket_matrix(0.0, 0.0)), (1.0 - w, ket_matrix(PI, 0.0))]
        }
        Encoding::Bloch => {
            let sq: Vec<f64> = x.chunks(3).map(|t| t[2] * t[2]).collect();
            let total: f64 = sq.iter().sum();
            let m = sq.len();
            x.chunks(3)
                .zip(sq)
                .map(|(t, s)| {
                    let w = if total > 0.0 { s / total } else { 1.0 / m as f64 };
                    (w, ket_matrix(t[0], t[1]))
                })
                .collect()
        }
    }
}

fn decode_state(x: &[f64]) -> ComplexMatrix {
    let r = x[0].sin().powi(2);
    let (st, ct) = x[1].sin_cos();
    let (sp, cp) = x[2].sin_cos();
    bloch_matrix(r * st * cp, r * st * sp, r * ct)
}

fn holevo_of(choi: &Choi, ens: &[(f64, ComplexMatrix)]) -> Result<f64> {
    let mut avg = ComplexMatrix::zeros(choi.d_out, choi.d_out);
    let mut conditional = 0.0;
    for (p, rho) in ens {
        if *p <= 0.0 {
            continue;
        }
        let out = choi.apply(rho);
        conditional += p * hermitian_entropy(&out)?;
        avg.add_assign_checked(&out.scale_real(*p))?;
    }
    Ok(hermitian_entropy(&avg)? - conditional)
}

fn coherent_of(choi: &Choi, rho: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_entropy(&choi.apply(rho))? - choi.exchange_entropy(rho)?)
}

struct Search {
    x: Vec<f64>,
    value: f64,
    converged: bool,
    evaluations: usize,
}

/// Maximizes `objective` from `canonical` plus `cfg.restarts − 1` random starts.
fn multistart<F, S>(objective: F, canonical: &[f64], sample: S, cfg: &OptimizerConfig) -> Search
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let opts = SimplexOptions {
        max_iterations: cfg.max_iterations as u64,
        sd_tolerance: (cfg.tolerance * 1e-5).max(1e-13),
        initial_step: 0.3,
    };
    let runs: Vec<Minimum> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = if r == 0 {
                canonical.to_vec()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64);
                sample(&mut rng)
            };
            minimize(|x| -objective(x), &x0, &opts)
        })
        .collect();

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = i;
        }
    }
    let best_value = -runs[best].value;
    let agreeing = runs
        .iter()
        .filter(|r| -r.value >= best_value - cfg.tolerance)
        .count();
    let mut evaluations: usize = runs.iter().map(|r| r.evaluations).sum();

    let polish = minimize(
        |x| -objective(x),
        &runs[best].x,
        &SimplexOptions {
            initial_step: 0.02,
            ..opts
        },
    );
    evaluations += polish.evaluations;
    let (x, value) = if -polish.value > best_value {
        (polish.x, -polish.value)
    } else {
        (runs[best].x.clone(), best_value)
    };
    Search {
        x,
        value,
        converged: agreeing >= cfg.restarts.min(2),
        evaluations,
    }
}

/// One-shot classical capacity `max χ` over input ensembles.
pub fn classical_capacity(ch: &Channel, cfg: &OptimizerConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    require_qubit_input(ch)?;
    let choi = Choi::new(ch);
    let encoding = cfg.encoding;
    let objective = |x: &[f64]| holevo_of(&choi, &decode_ensemble(x, encoding)).unwrap_or(f64::NAN);

    let search = match encoding {
        Encoding::ComputationalBasis => multistart(
            objective,
            &[FRAC_PI_4],
            |rng| vec![rng.random_range(0.0..FRAC_PI_2)],
            cfg,
        ),
        Encoding::Bloch => {
            let m = cfg.ensemble_size;
            let mut canonical = vec![0.0; 3 * m];
            canonical[2] = 1.0;
            canonical[3] = PI;
            canonical[5] = 1.0;
            multistart(
                objective,
                &canonical,
                |rng| {
                    (0..m)
                        .flat_map(|_| {
                            [
                                rng.random_range(0.0..PI),
                                rng.random_range(0.0..2.0 * PI),
                                rng.random_range(0.0..1.0),
                            ]
                        })
                        .collect()
                },
                cfg,
            )
        }
    };

    let entries = decode_ensemble(&search.x, encoding)
        .into_iter()
        .filter(|(p, _)| *p > 0.0)
        .map(|(p, rho)| (p, DensityMatrix::from_trusted(rho)))
        .collect();
    Ok(CapacityResult {
        value: search.value.max(0.0),
        raw_value: search.value,
        argmax: Argmax::Ensemble(Ensemble { entries }),
        converged: search.converged,
        evaluations: search.evaluations,
    })
}

/// One-shot quantum capacity `max I_c` over the Bloch ball, clamped at 0.
pub fn quantum_capacity(ch: &Channel, cfg: &OptimizerConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    require_qubit_input(ch)?;
    let choi = Choi::new(ch);
    let search = multistart(
        |x: &[f64]| coherent_of(&choi, &decode_state(x)).unwrap_or(f64::NAN),
        &[0.0, 0.0, 0.0],
        |rng| {
            vec![
                rng.random_range(0.0..FRAC_PI_2),
                rng.random_range(0.0..PI),
                rng.random_range(0.0..2.0 * PI),
            ]
        },
        cfg,
    );
    Ok(CapacityResult {
        value: search.value.max(0.0),
        raw_value: search.value,
        argmax: Argmax::State(DensityMatrix::from_trusted(decode_state(&search.x))),
        converged: search.converged,
        evaluations: search.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bit_flip, depolarizing, pauli, phase_flip, vacuum_extend, VacuumAmplitudes};
    use crate::qmatrix::testutil::{random_pure, random_state};
    use crate::supermaps::{
        coherent_superposition, fix_control, switch, switch_of_switch, trace_out_control,
        ControlState, SupermapKind,
    };
    use proptest::prelude::*;
    use rand::Rng;

    fn h2(q: f64) -> f64 {
        if q <= 0.0 || q >= 1.0 {
            0.0
        } else {
            -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
        }
    }

    fn fixed_switch(e: &Channel) -> Channel {
        let ch = switch(e, e).unwrap();
        fix_control(&ch, &ControlState::default_for(SupermapKind::Switch)).unwrap()
    }

    fn fixed_coh(e: &Channel) -> Channel {
        let amps = VacuumAmplitudes::concentrated(e.kraus_count());
        let v = vacuum_extend(e, &amps).unwrap();
        let ch = coherent_superposition(&v, &v).unwrap();
        fix_control(&ch, &ControlState::default_for(SupermapKind::CoherentSup)).unwrap()
    }

    fn basis_cfg() -> OptimizerConfig {
        OptimizerConfig {
            encoding: Encoding::ComputationalBasis,
            ..Default::default()
        }
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.7, DensityMatrix::basis(2, 0))]).is_err());
        assert!(Ensemble::new(vec![(1.0, DensityMatrix::maximally_mixed(2))]).is_err());
        assert!(Ensemble::new(vec![
            (1.5, DensityMatrix::basis(2, 0)),
            (-0.5, DensityMatrix::basis(2, 1))
        ])
        .is_err());
        assert!(Ensemble::new(vec![
            (0.5, DensityMatrix::basis(2, 0)),
            (0.5, DensityMatrix::basis(3, 1))
        ])
        .is_err());
        assert_eq!(Ensemble::canonical().len(), 2);
    }

    #[test]
    fn holevo_examples() {
        let id = Channel::identity(2);
        assert!((holevo_information(&id, &Ensemble::canonical()).unwrap() - 1.0).abs() < 1e-12);
        let single = Ensemble::new(vec![(1.0, DensityMatrix::plus())]).unwrap();
        assert!(holevo_information(&bit_flip(0.3).unwrap(), &single).unwrap().abs() < 1e-12);
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let ch = fixed_switch(&phase_flip(p).unwrap());
            let chi = holevo_information(&ch, &Ensemble::canonical()).unwrap();
            assert!((chi - 1.0).abs() < 1e-10, "p={p}: {chi}");
        }
    }

    #[test]
    fn holevo_of_bit_flip_in_z_basis() {
        for p in [0.1, 0.25, 0.4] {
            let chi = holevo_information(&bit_flip(p).unwrap(), &Ensemble::canonical()).unwrap();
            assert!((chi - (1.0 - h2(p))).abs() < 1e-12);
        }
    }

    #[test]
    fn holevo_rejects_wrong_dimension() {
        let ens = Ensemble::new(vec![(1.0, DensityMatrix::basis(4, 0))]).unwrap();
        assert!(matches!(
            holevo_information(&Channel::identity(2), &ens),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn complementary_examples() {
        let w = complementary_output(&Channel::identity(2), &DensityMatrix::plus()).unwrap();
        assert_eq!(w.dim(), 1);
        assert!((w.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);

        let p = 0.3;
        let w = complementary_output(&bit_flip(p).unwrap(), &DensityMatrix::maximally_mixed(2))
            .unwrap();
        let want = ComplexMatrix::diag_real(&[1.0 - p, p]);
        assert!(w.matrix().max_abs_diff(&want).unwrap() < 1e-14);

        assert!(complementary_output(&bit_flip(p).unwrap(), &DensityMatrix::basis(4, 0)).is_err());
    }

    #[test]
    fn coherent_information_examples() {
        let id = Channel::identity(2);
        let ic = coherent_information(&id, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((ic - 1.0).abs() < 1e-12);
        assert!(coherent_information(&id, &DensityMatrix::plus()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn choi_apply_matches_kraus_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = fixed_coh(&depolarizing(0.4).unwrap());
        let choi = Choi::new(&ch);
        for _ in 0..20 {
            let rho = random_state(&mut rng, 2);
            let a = choi.apply(rho.matrix());
            let b = ch.apply_matrix(rho.matrix()).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn exchange_entropy_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = pauli(0.1, 0.2, 0.05).unwrap();
        let sos = switch_of_switch(&e, &e, &e, &e).unwrap();
        let chans = [
            bit_flip(0.3).unwrap(),
            depolarizing(0.6).unwrap(),
            fixed_switch(&depolarizing(0.2).unwrap()),
            fixed_coh(&e),
            fix_control(&sos, &ControlState::default_for(SupermapKind::SwitchOfSwitch)).unwrap(),
        ];
        for ch in &chans {
            let choi = Choi::new(ch);
            for _ in 0..10 {
                let rho = random_state(&mut rng, 2);
                let via_w = hermitian_entropy(complementary_output(ch, &rho).unwrap().matrix())
                    .unwrap();
                let via_choi = choi.exchange_entropy(rho.matrix()).unwrap();
                assert!((via_w - via_choi).abs() < 1e-9, "{}: {via_w} vs {via_choi}", ch.label());
            }
        }
    }

    #[test]
    fn config_validation() {
        let bad = [
            OptimizerConfig { restarts: 0, ..Default::default() },
            OptimizerConfig { max_iterations: 0, ..Default::default() },
            OptimizerConfig { tolerance: 0.0, ..Default::default() },
            OptimizerConfig { ensemble_size: 5, ..Default::default() },
            OptimizerConfig { ensemble_size: 1, ..Default::default() },
        ];
        for cfg in bad {
            assert!(classical_capacity(&Channel::identity(2), &cfg).is_err(), "{cfg:?}");
        }
        assert!(matches!(
            quantum_capacity(&Channel::identity(3), &OptimizerConfig::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn identity_capacities() {
        let id = Channel::identity(2);
        for cfg in [OptimizerConfig::default(), basis_cfg()] {
            let r = classical_capacity(&id, &cfg).unwrap();
            assert!((r.value - 1.0).abs() < 1e-6);
            assert!(r.converged);
        }
        let r = quantum_capacity(&id, &OptimizerConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!(matches!(r.argmax, Argmax::State(_)));
    }

    #[test]
    fn coherent_bit_flip_at_half_in_computational_basis() {
        let ch = trace_out_control(&fixed_coh(&bit_flip(0.5).unwrap()), 2).unwrap();
        let r = classical_capacity(&ch, &basis_cfg()).unwrap();
        assert!(r.value.abs() < 1e-3, "{}", r.value);
        // The ±-basis survives every bit flip, so the unrestricted optimum is a full bit.
        let r = classical_capacity(&ch, &OptimizerConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn switch_depolarizing_at_one_is_positive() {
        let ch = trace_out_control(&fixed_switch(&depolarizing(1.0).unwrap()), 2).unwrap();
        let r = classical_capacity(&ch, &basis_cfg()).unwrap();
        let q = (1.0 - (1.0f64 - 4.0 / 3.0).powi(2)) / 2.0;
        assert!(r.value > 0.0);
        assert!((r.value - (1.0 - h2(q))).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn switch_bit_flip_quantum_capacity() {
        let q1 = |p: f64| 1.0 - h2(2.0 * p * (1.0 - p));
        for p in [0.0, 0.1, 0.3, 0.5, 0.8, 1.0] {
            let ch = fixed_switch(&bit_flip(p).unwrap());
            let r = quantum_capacity(&ch, &OptimizerConfig::default()).unwrap();
            assert!((r.value - q1(p)).abs() < 1e-3, "p={p}: {} vs {}", r.value, q1(p));
            assert!(r.value >= 0.0 && r.raw_value <= r.value + 1e-15);
        }
    }

    #[test]
    fn quantum_capacity_clamps_negative_optimum() {
        let r = quantum_capacity(&depolarizing(0.75).unwrap(), &OptimizerConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.raw_value <= 1e-9);
    }

    #[test]
    fn capacity_is_reproducible_for_a_seed() {
        let ch = fixed_switch(&depolarizing(0.35).unwrap());
        let cfg = OptimizerConfig { seed: 42, ..Default::default() };
        let a = classical_capacity(&ch, &cfg).unwrap();
        let b = classical_capacity(&ch, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn doubling_restarts_is_stable() {
        let ch = fixed_coh(&depolarizing(0.4).unwrap());
        let cfg = OptimizerConfig::default();
        let doubled = OptimizerConfig { restarts: 2 * cfg.restarts, ..cfg };
        let a = quantum_capacity(&ch, &cfg).unwrap().value;
        let b = quantum_capacity(&ch, &doubled).unwrap().value;
        assert!((a - b).abs() <= cfg.tolerance, "{a} vs {b}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn holevo_is_bounded(seed in any::<u64>(), px in 0.0..0.33f64, py in 0.0..0.33f64, pz in 0.0..0.33f64, m in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ch = fixed_switch(&pauli(px, py, pz).unwrap());
            let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let ens = Ensemble::new(
                raw.iter().map(|w| (w / total, random_pure(&mut rng, 2))).collect()
            ).unwrap();
            let chi = holevo_information(&ch, &ens).unwrap();
            prop_assert!(chi >= 0.0);
            prop_assert!(chi <= (ch.d_out() as f64).log2().min((m as f64).log2()) + 1e-9);
        }

        #[test]
        fn complementary_output_is_a_state(seed in any::<u64>(), p in 0.0..=1.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_state(&mut rng, 2);
            for e in [bit_flip(p).unwrap(), phase_flip(p).unwrap(), depolarizing(p).unwrap()] {
                for ch in [fixed_switch(&e), fixed_coh(&e)] {
                    let w = complementary_output(&ch, &rho).unwrap();
                    prop_assert!(DensityMatrix::new(w.into_matrix()).is_ok());
                }
            }
        }

        #[test]
        fn capacities_dominate_canonical_points(p in 0.0..=1.0f64, family in 0usize..3) {
            let e = match family {
                0 => bit_flip(p).unwrap(),
                1 => phase_flip(p).unwrap(),
                _ => depolarizing(p).unwrap(),
            };
            let ch = fixed_switch(&e);
            let cfg = OptimizerConfig { restarts: 2, ..Default::default() };
            let chi0 = holevo_information(&ch, &Ensemble::canonical()).unwrap();
            let ic0 = coherent_information(&ch, &DensityMatrix::maximally_mixed(2)).unwrap();
            prop_assert!(classical_capacity(&ch, &cfg).unwrap().raw_value >= chi0 - 1e-9);
            prop_assert!(quantum_capacity(&ch, &cfg).unwrap().raw_value >= ic0 - 1e-9);
        }
    }
}
