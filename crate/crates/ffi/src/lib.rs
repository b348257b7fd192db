//! C ABI for `qsupermap`.
//!
//! Every fallible function returns a [`QsmStatus`]; on failure a message is
//! available from [`qsm_last_error_message`] until the next call on the same
//! thread. Channels are opaque heap handles released with
//! [`qsm_channel_free`]. Matrices cross the boundary as separate row-major
//! real and imaginary `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qsupermap::channels::{bit_flip, depolarizing, phase_flip, Channel};
use qsupermap::experiment::{CapacityType, ClassicalReadout, Family, Scenario};
use qsupermap::infotheory::{
    classical_capacity, coherent_information, quantum_capacity, CapacityResult, Encoding,
    OptimizerConfig,
};
use qsupermap::oracle::{closed_form, ClosedFormId};
use qsupermap::qmatrix::{c, ComplexMatrix, DensityMatrix};
use qsupermap::supermaps::{fix_control, switch, ControlState, SupermapKind};
use qsupermap::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    UnmappedClosedForm = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsmConfiguration {
    Switch = 0,
    CoherentSuperposition = 1,
    SwitchOfSwitch = 2,
    SwitchOfCoherent = 3,
    CoherentOfSwitch = 4,
    CoherentOfCoherent = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsmFamily {
    BitFlip = 0,
    PhaseFlip = 1,
    MixedAlternating = 2,
    MixedBlock = 3,
    Depolarizing = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsmCapacityType {
    Classical = 0,
    Quantum = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsmReadout {
    TargetBasis = 0,
    FullHolevo = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsmEncoding {
    Bloch = 0,
    ComputationalBasis = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QsmOptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub ensemble_size: usize,
    pub encoding: QsmEncoding,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QsmCapacity {
    pub value: f64,
    pub raw_value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// Opaque channel handle.
pub struct QsmChannel(Channel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QsmStatus {
    match e {
        Error::DimensionMismatch(_) => QsmStatus::DimensionMismatch,
        Error::NotHermitian(_) | Error::InvalidState(_) | Error::NegativeEigenvalue(_) => {
            QsmStatus::InvalidState
        }
        Error::UnmappedClosedForm { .. } => QsmStatus::UnmappedClosedForm,
        Error::Domain(_)
        | Error::Unnormalized(_)
        | Error::MixedControl(_)
        | Error::InvalidEnsemble(_)
        | Error::UnknownToken(_) => QsmStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QsmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QsmStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null"));
            QsmStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            QsmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(p: *mut T, what: &'static str, v: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn read_matrix(
    re: *const f64,
    im: *const f64,
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix, Failure> {
    if re.is_null() {
        return Err(Failure::Null("real part"));
    }
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::DimensionMismatch("matrix too large".into()))?;
    let re = std::slice::from_raw_parts(re, n);
    let data = if im.is_null() {
        re.iter().map(|&r| c(r, 0.0)).collect()
    } else {
        let im = std::slice::from_raw_parts(im, n);
        re.iter().zip(im).map(|(&r, &i)| c(r, i)).collect()
    };
    Ok(ComplexMatrix::new(rows, cols, data)?)
}

fn boxed(ch: Channel) -> *mut QsmChannel {
    Box::into_raw(Box::new(QsmChannel(ch)))
}

impl From<QsmConfiguration> for SupermapKind {
    fn from(c: QsmConfiguration) -> Self {
        match c {
            QsmConfiguration::Switch => SupermapKind::Switch,
            QsmConfiguration::CoherentSuperposition => SupermapKind::CoherentSup,
            QsmConfiguration::SwitchOfSwitch => SupermapKind::SwitchOfSwitch,
            QsmConfiguration::SwitchOfCoherent => SupermapKind::SwitchOfCoh,
            QsmConfiguration::CoherentOfSwitch => SupermapKind::CohOfSwitch,
            QsmConfiguration::CoherentOfCoherent => SupermapKind::CohOfCoh,
        }
    }
}

impl From<QsmFamily> for Family {
    fn from(f: QsmFamily) -> Self {
        match f {
            QsmFamily::BitFlip => Family::BitFlip,
            QsmFamily::PhaseFlip => Family::PhaseFlip,
            QsmFamily::MixedAlternating => Family::MixedAlternating,
            QsmFamily::MixedBlock => Family::MixedBlock,
            QsmFamily::Depolarizing => Family::Depolarizing,
        }
    }
}

impl From<QsmCapacityType> for CapacityType {
    fn from(c: QsmCapacityType) -> Self {
        match c {
            QsmCapacityType::Classical => CapacityType::Classical,
            QsmCapacityType::Quantum => CapacityType::Quantum,
        }
    }
}

impl From<QsmReadout> for ClassicalReadout {
    fn from(r: QsmReadout) -> Self {
        match r {
            QsmReadout::TargetBasis => ClassicalReadout::TargetBasis,
            QsmReadout::FullHolevo => ClassicalReadout::FullHolevo,
        }
    }
}

impl From<&QsmOptimizerConfig> for OptimizerConfig {
    fn from(c: &QsmOptimizerConfig) -> Self {
        OptimizerConfig {
            restarts: c.restarts,
            max_iterations: c.max_iterations,
            tolerance: c.tolerance,
            seed: c.seed,
            ensemble_size: c.ensemble_size,
            encoding: match c.encoding {
                QsmEncoding::Bloch => Encoding::Bloch,
                QsmEncoding::ComputationalBasis => Encoding::ComputationalBasis,
            },
        }
    }
}

impl From<CapacityResult> for QsmCapacity {
    fn from(r: CapacityResult) -> Self {
        QsmCapacity {
            value: r.value,
            raw_value: r.raw_value,
            converged: r.converged,
            evaluations: r.evaluations,
        }
    }
}

/// Message for the most recent failure on this thread, or null. Owned by the
/// library and valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn qsm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qsm_optimizer_config_default() -> QsmOptimizerConfig {
    let d = OptimizerConfig::default();
    QsmOptimizerConfig {
        restarts: d.restarts,
        max_iterations: d.max_iterations,
        tolerance: d.tolerance,
        seed: d.seed,
        ensemble_size: d.ensemble_size,
        encoding: QsmEncoding::Bloch,
    }
}

/// Builds a channel from `count` Kraus operators of shape `d_out × d_in`,
/// stored back to back. `kraus_im` may be null for real operators.
///
/// # Safety
/// `kraus_re` (and `kraus_im` when non-null) must point to
/// `count * d_out * d_in` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_new(
    kraus_re: *const f64,
    kraus_im: *const f64,
    count: usize,
    d_out: usize,
    d_in: usize,
    out: *mut *mut QsmChannel,
) -> QsmStatus {
    guard(|| {
        let stride = d_out
            .checked_mul(d_in)
            .ok_or_else(|| Error::DimensionMismatch("operator too large".into()))?;
        let mut kraus = Vec::with_capacity(count);
        for k in 0..count {
            let im = if kraus_im.is_null() {
                ptr::null()
            } else {
                kraus_im.add(k * stride)
            };
            let re = if kraus_re.is_null() {
                ptr::null()
            } else {
                kraus_re.add(k * stride)
            };
            kraus.push(read_matrix(re, im, d_out, d_in)?);
        }
        let ch = Channel::new(kraus, "custom")?;
        write_out(out, "out", boxed(ch))
    })
}

/// Bit flip with probability `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_bit_flip(p: f64, out: *mut *mut QsmChannel) -> QsmStatus {
    guard(|| write_out(out, "out", boxed(bit_flip(p)?)))
}

/// Phase flip with probability `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_phase_flip(p: f64, out: *mut *mut QsmChannel) -> QsmStatus {
    guard(|| write_out(out, "out", boxed(phase_flip(p)?)))
}

/// Depolarizing channel with total error probability `p`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_depolarizing(p: f64, out: *mut *mut QsmChannel) -> QsmStatus {
    guard(|| write_out(out, "out", boxed(depolarizing(p)?)))
}

/// Quantum switch of two channels on `control ⊗ target`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_switch(
    a: *const QsmChannel,
    b: *const QsmChannel,
    out: *mut *mut QsmChannel,
) -> QsmStatus {
    guard(|| {
        let ch = switch(&deref(a, "a")?.0, &deref(b, "b")?.0)?;
        write_out(out, "out", boxed(ch))
    })
}

/// Fixes the leading `qubits` control qubits of `ch` at `|+⟩` each.
///
/// # Safety
/// `ch` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_fix_control_plus(
    ch: *const QsmChannel,
    qubits: usize,
    out: *mut *mut QsmChannel,
) -> QsmStatus {
    guard(|| {
        if !matches!(qubits, 1 | 2) {
            return Err(Error::Domain(format!("control must be 1 or 2 qubits, got {qubits}")).into());
        }
        let fixed = fix_control(&deref(ch, "ch")?.0, &ControlState::plus(qubits))?;
        write_out(out, "out", boxed(fixed))
    })
}

/// Fixed-control channel (target in, full output out) for a configuration,
/// family and noise level.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_scenario_channel(
    configuration: QsmConfiguration,
    family: QsmFamily,
    p: f64,
    out: *mut *mut QsmChannel,
) -> QsmStatus {
    guard(|| {
        let ch = Scenario::new(configuration.into(), family.into(), p).fixed_channel()?;
        write_out(out, "out", boxed(ch))
    })
}

/// # Safety
/// `ch` must be a live handle or null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_free(ch: *mut QsmChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// # Safety
/// `ch` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_dims(
    ch: *const QsmChannel,
    d_in: *mut usize,
    d_out: *mut usize,
    kraus_count: *mut usize,
) -> QsmStatus {
    guard(|| {
        let ch = &deref(ch, "ch")?.0;
        write_out(d_in, "d_in", ch.d_in())?;
        write_out(d_out, "d_out", ch.d_out())?;
        write_out(kraus_count, "kraus_count", ch.kraus_count())
    })
}

/// Applies `ch` to the `d_in × d_in` state `rho`, writing a `d_out × d_out` state.
///
/// # Safety
/// Input arrays hold `d_in²` doubles (`rho_im` may be null); output arrays
/// hold `d_out²` doubles.
#[no_mangle]
pub unsafe extern "C" fn qsm_channel_apply(
    ch: *const QsmChannel,
    rho_re: *const f64,
    rho_im: *const f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> QsmStatus {
    guard(|| {
        let ch = &deref(ch, "ch")?.0;
        let rho = DensityMatrix::new(read_matrix(rho_re, rho_im, ch.d_in(), ch.d_in())?)?;
        let out = ch.apply(&rho)?;
        if out_re.is_null() || out_im.is_null() {
            return Err(Failure::Null("output buffer"));
        }
        for (i, z) in out.matrix().as_slice().iter().enumerate() {
            out_re.add(i).write(z.re);
            out_im.add(i).write(z.im);
        }
        Ok(())
    })
}

/// # Safety
/// As for [`qsm_channel_apply`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_coherent_information(
    ch: *const QsmChannel,
    rho_re: *const f64,
    rho_im: *const f64,
    out: *mut f64,
) -> QsmStatus {
    guard(|| {
        let ch = &deref(ch, "ch")?.0;
        let rho = DensityMatrix::new(read_matrix(rho_re, rho_im, ch.d_in(), ch.d_in())?)?;
        write_out(out, "out", coherent_information(ch, &rho)?)
    })
}

/// # Safety
/// `ch` and `cfg` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_classical_capacity(
    ch: *const QsmChannel,
    cfg: *const QsmOptimizerConfig,
    out: *mut QsmCapacity,
) -> QsmStatus {
    guard(|| {
        let r = classical_capacity(&deref(ch, "ch")?.0, &deref(cfg, "cfg")?.into())?;
        write_out(out, "out", r.into())
    })
}

/// # Safety
/// `ch` and `cfg` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_quantum_capacity(
    ch: *const QsmChannel,
    cfg: *const QsmOptimizerConfig,
    out: *mut QsmCapacity,
) -> QsmStatus {
    guard(|| {
        let r = quantum_capacity(&deref(ch, "ch")?.0, &deref(cfg, "cfg")?.into())?;
        write_out(out, "out", r.into())
    })
}

/// Capacity of one configuration/family point under the given readout.
///
/// # Safety
/// `cfg` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_scenario_capacity(
    configuration: QsmConfiguration,
    family: QsmFamily,
    p: f64,
    capacity_type: QsmCapacityType,
    readout: QsmReadout,
    cfg: *const QsmOptimizerConfig,
    out: *mut QsmCapacity,
) -> QsmStatus {
    guard(|| {
        let scenario = Scenario::new(configuration.into(), family.into(), p);
        let r = scenario.capacity(capacity_type.into(), readout.into(), &deref(cfg, "cfg")?.into())?;
        write_out(out, "out", r.into())
    })
}

/// Closed-form capacity in bits, or `QSM_STATUS_UNMAPPED_CLOSED_FORM`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsm_closed_form(
    configuration: QsmConfiguration,
    family: QsmFamily,
    capacity_type: QsmCapacityType,
    p: f64,
    out: *mut f64,
) -> QsmStatus {
    guard(|| {
        let id = ClosedFormId::new(configuration.into(), family.into(), capacity_type.into());
        write_out(out, "out", closed_form(&id, p)?)
    })
}
