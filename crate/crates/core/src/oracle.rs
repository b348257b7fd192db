//! Closed-form capacities used as ground truth for the optimizer.
//!
//! Each expression is transcribed as printed (natural logs, `ArcTanh`,
//! `arccoth`) and converted to bits. Removable singularities are replaced
//! by their limits: a vanishing prefactor times a divergent `atanh` or `ln`
//! contributes 0.

use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::experiment::{CapacityType, Family};
use crate::supermaps::SupermapKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedFormId {
    pub configuration: SupermapKind,
    pub family: Family,
    pub capacity_type: CapacityType,
}

impl ClosedFormId {
    pub fn new(configuration: SupermapKind, family: Family, capacity_type: CapacityType) -> Self {
        Self {
            configuration,
            family,
            capacity_type,
        }
    }

    pub fn classical(configuration: SupermapKind, family: Family) -> Self {
        Self::new(configuration, family, CapacityType::Classical)
    }
}

impl fmt::Display for ClosedFormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}",
            self.configuration, self.family, self.capacity_type
        )
    }
}

/// `x · ln y`, taken as 0 when `x` is 0.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `k · atanh(a)`, taken as 0 when `k` is 0.
fn k_atanh(k: f64, a: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * a.atanh()
    }
}

/// `(4p(p−1) atanh((1−2p)²) + ln(2 + 4p(p−1))) / ln 2`
fn switch_bit(p: f64) -> f64 {
    let k = 4.0 * p * (p - 1.0);
    (k_atanh(k, (1.0 - 2.0 * p).powi(2)) + (2.0 + k).ln()) / LN_2
}

/// `(ln(2 − 2p) + p ln(p / (1 − p))) / ln 2`
fn log_ratio_form(p: f64) -> f64 {
    if p == 1.0 {
        return 1.0;
    }
    ((2.0 - 2.0 * p).ln() + xlny(p, p / (1.0 - p))) / LN_2
}

/// `(8p(2p−3) arccoth(9/(3−4p)²) + ln 512 + 9 ln(1 + 4/9 p(2p−3))) / ln 512`
fn switch_depolarizing(p: f64) -> f64 {
    let ln512 = 9.0 * LN_2;
    let k = 8.0 * p * (2.0 * p - 3.0);
    let arccoth = k_atanh(k, (3.0 - 4.0 * p).powi(2) / 9.0);
    (arccoth + ln512 + 9.0 * (1.0 + 4.0 / 9.0 * p * (2.0 * p - 3.0)).ln()) / ln512
}

/// `((2 − p) ln(2 − p) + p ln p) / ln 4`
fn half_shifted(p: f64) -> f64 {
    ((2.0 - p) * (2.0 - p).ln() + xlny(p, p)) / (2.0 * LN_2)
}

/// `1 − 4p atanh(1 − 4p/3) / ln 8 + 3 ln(1 − 2p/3) / ln 8`
fn coh_depolarizing(p: f64) -> f64 {
    let ln8 = 3.0 * LN_2;
    1.0 - k_atanh(4.0 * p, 1.0 - 4.0 * p / 3.0) / ln8 + 3.0 * (1.0 - 2.0 * p / 3.0).ln() / ln8
}

/// `1 + p log₂ p + (1 − p) log₂(1 − p)`
fn one_minus_binary_entropy(p: f64) -> f64 {
    1.0 + (xlny(p, p) + xlny(1.0 - p, 1.0 - p)) / LN_2
}

/// `1 + log₂(1 + p(p−1)) + 2p(p−1) atanh(1 + 2p(p−1)) / ln 2`
fn nested_block(p: f64) -> f64 {
    let q = p * (p - 1.0);
    1.0 + (1.0 + q).log2() + k_atanh(2.0 * q, 1.0 + 2.0 * q) / LN_2
}

/// `(2p(p−1) atanh(1 + 2p(p−1)) + ln(2 + 2p(p−1))) / ln 2`
fn soc_alternating(p: f64) -> f64 {
    let k = 2.0 * p * (p - 1.0);
    (k_atanh(k, 1.0 + k) + (2.0 + k).ln()) / LN_2
}

/// `1 + 8p(2p−3) arccoth(9/(3−4p)²) / (9 ln 2) + log₂(1 + 4/9 p(2p−3))`
fn nested_depolarizing(p: f64) -> f64 {
    let k = 8.0 * p * (2.0 * p - 3.0);
    1.0 + k_atanh(k, (3.0 - 4.0 * p).powi(2) / 9.0) / (9.0 * LN_2)
        + (1.0 + 4.0 / 9.0 * p * (2.0 * p - 3.0)).log2()
}

/// `1 − (2/ln 2) p(p−1) ln(−2p(p−1)) + (1/ln 2)(1 + 2p(p−1)) ln(1 + 2p(p−1))`
fn switch_bit_quantum(p: f64) -> f64 {
    let q = p * (p - 1.0);
    1.0 - 2.0 / LN_2 * xlny(q, -2.0 * q) + (1.0 + 2.0 * q) * (1.0 + 2.0 * q).ln() / LN_2
}

fn one(_: f64) -> f64 {
    1.0
}

type Expr = fn(f64) -> f64;

fn lookup(id: &ClosedFormId) -> Option<Expr> {
    use Family::*;
    use SupermapKind::*;
    if id.capacity_type == CapacityType::Quantum {
        return (id.configuration == Switch && id.family == BitFlip)
            .then_some(switch_bit_quantum as Expr);
    }
    let f: Expr = match (id.configuration, id.family) {
        (Switch, BitFlip) => switch_bit,
        (Switch, PhaseFlip) => one,
        (Switch, MixedAlternating) => log_ratio_form,
        (Switch, Depolarizing) => switch_depolarizing,

        (CoherentSup, BitFlip) => log_ratio_form,
        (CoherentSup, PhaseFlip) => one,
        (CoherentSup, MixedAlternating) => half_shifted,
        (CoherentSup, Depolarizing) => coh_depolarizing,

        (SwitchOfSwitch, BitFlip) => switch_bit,
        (SwitchOfSwitch, PhaseFlip) => one,
        (SwitchOfSwitch, MixedAlternating) => one_minus_binary_entropy,
        (SwitchOfSwitch, MixedBlock) => nested_block,
        (SwitchOfSwitch, Depolarizing) => nested_depolarizing,

        (SwitchOfCoh, BitFlip) => switch_bit,
        (SwitchOfCoh, PhaseFlip) => one,
        (SwitchOfCoh, MixedAlternating) => soc_alternating,
        (SwitchOfCoh, MixedBlock) => one_minus_binary_entropy,
        (SwitchOfCoh, Depolarizing) => nested_depolarizing,

        (CohOfSwitch, BitFlip) => switch_bit,
        (CohOfSwitch, PhaseFlip) => one,
        (CohOfSwitch, MixedAlternating) => one_minus_binary_entropy,
        (CohOfSwitch, MixedBlock) => nested_block,
        (CohOfSwitch, Depolarizing) => nested_depolarizing,

        (CohOfCoh, BitFlip) => one_minus_binary_entropy,
        (CohOfCoh, PhaseFlip) => one,
        (CohOfCoh, MixedAlternating) => half_shifted,
        (CohOfCoh, MixedBlock) => half_shifted,
        (CohOfCoh, Depolarizing) => coh_depolarizing,

        (Switch | CoherentSup, MixedBlock) => return None,
    };
    Some(f)
}

/// Every id with a closed form, configurations in [`SupermapKind::ALL`] order.
pub fn list_available() -> Vec<ClosedFormId> {
    let mut ids = Vec::new();
    for capacity_type in CapacityType::ALL {
        for configuration in SupermapKind::ALL {
            for family in Family::ALL {
                let id = ClosedFormId::new(configuration, family, capacity_type);
                if lookup(&id).is_some() {
                    ids.push(id);
                }
            }
        }
    }
    ids
}

/// Closed-form capacity in bits at noise level `p ∈ [0, 1]`.
pub fn closed_form(id: &ClosedFormId, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    let f = lookup(id).ok_or_else(|| Error::UnmappedClosedForm {
        requested: id.to_string(),
        available: list_available()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", "),
    })?;
    Ok(f(p))
}
