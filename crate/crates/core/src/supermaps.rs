//! Supermaps: the quantum switch, coherent superposition of channels and
//! their four nested combinations.
//!
//! Composite spaces are control-major: `control ⊗ target`, with outer
//! controls to the left of inner ones. For a coherent superposition the
//! direct-sum block index plays the role of the path (control) qubit, so
//! `A ⊕ B = |0⟩⟨0| ⊗ A + |1⟩⟨1| ⊗ B` lands in the same space as a switch.
//! Every composite acting on qubit targets therefore has the target as its
//! last tensor factor.

use std::fmt;
use std::str::FromStr;

use crate::channels::{Channel, VacuumAmplitudes, VacuumExtendedChannel};
use crate::error::{Error, Result};
use crate::qmatrix::{direct_sum, tensor, ComplexMatrix, DensityMatrix, ONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SupermapKind {
    Switch,
    CoherentSup,
    SwitchOfSwitch,
    CohOfCoh,
    SwitchOfCoh,
    CohOfSwitch,
}

impl SupermapKind {
    pub const ALL: [SupermapKind; 6] = [
        SupermapKind::Switch,
        SupermapKind::CoherentSup,
        SupermapKind::SwitchOfSwitch,
        SupermapKind::SwitchOfCoh,
        SupermapKind::CohOfSwitch,
        SupermapKind::CohOfCoh,
    ];

    /// Lowercase token used on the command line and in CSV output.
    pub fn token(self) -> &'static str {
        match self {
            SupermapKind::Switch => "switch",
            SupermapKind::CoherentSup => "cohsup",
            SupermapKind::SwitchOfSwitch => "sos",
            SupermapKind::SwitchOfCoh => "soc",
            SupermapKind::CohOfSwitch => "cos",
            SupermapKind::CohOfCoh => "coc",
        }
    }

    /// Number of channels the supermap consumes.
    pub fn channel_slots(self) -> usize {
        if self.is_nested() {
            4
        } else {
            2
        }
    }

    pub fn is_nested(self) -> bool {
        !matches!(self, SupermapKind::Switch | SupermapKind::CoherentSup)
    }

    /// Number of control (or path) qubits in front of the target.
    pub fn control_qubits(self) -> usize {
        if self.is_nested() {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for SupermapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SupermapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SupermapKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::UnknownToken(s.to_string()))
    }
}

/// State of the control register (one or two qubits).
#[derive(Clone, Debug, PartialEq)]
pub struct ControlState(DensityMatrix);

impl ControlState {
    pub fn new(rho: DensityMatrix) -> Result<Self> {
        if !matches!(rho.dim(), 2 | 4) {
            return Err(Error::DimensionMismatch(format!(
                "control register must hold one or two qubits, got dimension {}",
                rho.dim()
            )));
        }
        Ok(Self(rho))
    }

    /// `|+⟩^{⊗qubits}`.
    pub fn plus(qubits: usize) -> Self {
        assert!(matches!(qubits, 1 | 2));
        let plus = DensityMatrix::plus();
        if qubits == 1 {
            Self(plus)
        } else {
            Self(plus.tensor(&plus))
        }
    }

    /// Default control for a supermap kind: `|+⟩` or `|++⟩`.
    pub fn default_for(kind: SupermapKind) -> Self {
        Self::plus(kind.control_qubits())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Self::new(DensityMatrix::basis(dim, index))
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Normalized ket for a pure control (global phase fixed by the largest component).
    fn ket(&self) -> Result<ComplexMatrix> {
        let purity = self.0.purity();
        if (purity - 1.0).abs() > 1e-9 {
            return Err(Error::MixedControl(purity));
        }
        let m = self.0.matrix();
        let d = m.rows();
        let pivot = (0..d)
            .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
            .expect("non-empty");
        let scale = m[(pivot, pivot)].re.sqrt();
        let mut ket = ComplexMatrix::zeros(d, 1);
        for i in 0..d {
            ket[(i, 0)] = m[(i, pivot)] / scale;
        }
        Ok(ket)
    }
}

fn check_same_square(label: &str, a: &Channel, b: &Channel) -> Result<()> {
    for ch in [a, b] {
        if ch.d_in() != ch.d_out() {
            return Err(Error::DimensionMismatch(format!(
                "{label}: channel `{}` is not square ({} -> {})",
                ch.label(),
                ch.d_in(),
                ch.d_out()
            )));
        }
    }
    if a.d_in() != b.d_in() {
        return Err(Error::DimensionMismatch(format!(
            "{label}: channels act on {} and {} dimensions",
            a.d_in(),
            b.d_in()
        )));
    }
    Ok(())
}

/// `|0⟩⟨0| ⊗ (b·a) + |1⟩⟨1| ⊗ (a·b)` for every pair, first list major.
fn switch_kraus(first: &[ComplexMatrix], second: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
    let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
    let mut out = Vec::with_capacity(first.len() * second.len());
    for a in first {
        for b in second {
            let one_then_two = b * a;
            let two_then_one = a * b;
            out.push(&tensor(&p0, &one_then_two) + &tensor(&p1, &two_then_one));
        }
    }
    out
}

/// `(a βⱼ) ⊕ (αᵢ b)` for every pair, first list major.
fn coherent_kraus(
    first: &[ComplexMatrix],
    first_amps: &VacuumAmplitudes,
    second: &[ComplexMatrix],
    second_amps: &VacuumAmplitudes,
) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(first.len() * second.len());
    for (a, &alpha) in first.iter().zip(first_amps.as_slice()) {
        for (b, &beta) in second.iter().zip(second_amps.as_slice()) {
            out.push(direct_sum(&a.scale(beta), &b.scale(alpha)));
        }
    }
    out
}

fn check_amps(label: &str, kraus: usize, amps: &VacuumAmplitudes) -> Result<()> {
    if amps.len() != kraus {
        return Err(Error::DimensionMismatch(format!(
            "{label}: {} vacuum amplitudes for {kraus} Kraus operators",
            amps.len()
        )));
    }
    VacuumAmplitudes::new(amps.as_slice().to_vec()).map(|_| ())
}

fn composite(kraus: Vec<ComplexMatrix>, label: String) -> Result<Channel> {
    Channel::from_kraus_unchecked(kraus, label)
}

/// Quantum switch of two channels, on `control ⊗ target`:
/// `Mᵢⱼ = |0⟩⟨0| ⊗ Lⱼ Kᵢ + |1⟩⟨1| ⊗ Kᵢ Lⱼ`.
pub fn switch(e1: &Channel, e2: &Channel) -> Result<Channel> {
    check_same_square("switch", e1, e2)?;
    composite(
        switch_kraus(e1.kraus(), e2.kraus()),
        format!("switch({}, {})", e1.label(), e2.label()),
    )
}

/// Coherent superposition of two vacuum-extended channels, on `path ⊗ target`:
/// `Nᵢⱼ = Kᵢ βⱼ ⊕ αᵢ Lⱼ`.
pub fn coherent_superposition(
    e1: &VacuumExtendedChannel,
    e2: &VacuumExtendedChannel,
) -> Result<Channel> {
    check_same_square("coherent superposition", e1.base(), e2.base())?;
    check_amps("coherent superposition", e1.base().kraus_count(), e1.amps())?;
    check_amps("coherent superposition", e2.base().kraus_count(), e2.amps())?;
    composite(
        coherent_kraus(e1.base().kraus(), e1.amps(), e2.base().kraus(), e2.amps()),
        format!("cohsup({}, {})", e1.base().label(), e2.base().label()),
    )
}

/// Switch of the two switches `S(e1, e2)` and `S(e3, e4)`, on
/// `outer ⊗ inner ⊗ target`: `M′ᵢⱼₖₗ = |0⟩⟨0| ⊗ M⁽²⁾ₖₗ M⁽¹⁾ᵢⱼ + |1⟩⟨1| ⊗ M⁽¹⁾ᵢⱼ M⁽²⁾ₖₗ`.
pub fn switch_of_switch(e1: &Channel, e2: &Channel, e3: &Channel, e4: &Channel) -> Result<Channel> {
    check_same_square("switch of switches", e1, e2)?;
    check_same_square("switch of switches", e3, e4)?;
    check_same_square("switch of switches", e1, e3)?;
    let inner1 = switch_kraus(e1.kraus(), e2.kraus());
    let inner2 = switch_kraus(e3.kraus(), e4.kraus());
    composite(
        switch_kraus(&inner1, &inner2),
        format!(
            "sos({}, {}, {}, {})",
            e1.label(),
            e2.label(),
            e3.label(),
            e4.label()
        ),
    )
}

/// Coherent superposition of `C(e1, e2)` and `C(e3, e4)`:
/// `N′ᵢⱼₖₗ = N⁽¹⁾ᵢⱼ βₖₗ ⊕ αᵢⱼ N⁽²⁾ₖₗ`, where the outer amplitudes are indexed
/// by the inner composite Kraus indices.
pub fn coh_of_coh(
    e1: &VacuumExtendedChannel,
    e2: &VacuumExtendedChannel,
    e3: &VacuumExtendedChannel,
    e4: &VacuumExtendedChannel,
    outer_amps_a: &VacuumAmplitudes,
    outer_amps_b: &VacuumAmplitudes,
) -> Result<Channel> {
    let inner1 = coherent_superposition(e1, e2)?;
    let inner2 = coherent_superposition(e3, e4)?;
    check_same_square("coherent superposition of superpositions", &inner1, &inner2)?;
    check_amps("outer amplitudes (first branch)", inner1.kraus_count(), outer_amps_a)?;
    check_amps("outer amplitudes (second branch)", inner2.kraus_count(), outer_amps_b)?;
    composite(
        coherent_kraus(inner1.kraus(), outer_amps_a, inner2.kraus(), outer_amps_b),
        format!("coc({}, {})", inner1.label(), inner2.label()),
    )
}

/// Switch of the two coherent superpositions `C(e1, e2)` and `C(e3, e4)`, which
/// share the path register: `M′ = |0⟩⟨0| ⊗ N⁽²⁾N⁽¹⁾ + |1⟩⟨1| ⊗ N⁽¹⁾N⁽²⁾`.
pub fn switch_of_coh(
    e1: &VacuumExtendedChannel,
    e2: &VacuumExtendedChannel,
    e3: &VacuumExtendedChannel,
    e4: &VacuumExtendedChannel,
) -> Result<Channel> {
    let inner1 = coherent_superposition(e1, e2)?;
    let inner2 = coherent_superposition(e3, e4)?;
    check_same_square("switch of superpositions", &inner1, &inner2)?;
    composite(
        switch_kraus(inner1.kraus(), inner2.kraus()),
        format!("soc({}, {})", inner1.label(), inner2.label()),
    )
}

/// Coherent superposition of the switches `S(e1, e2)` and `S(e3, e4)`:
/// `N′ᵢⱼₖₗ = M⁽¹⁾ᵢⱼ βₖₗ ⊕ αᵢⱼ M⁽²⁾ₖₗ`.
pub fn coh_of_switch(
    e1: &Channel,
    e2: &Channel,
    e3: &Channel,
    e4: &Channel,
    outer_amps_a: &VacuumAmplitudes,
    outer_amps_b: &VacuumAmplitudes,
) -> Result<Channel> {
    let inner1 = switch(e1, e2)?;
    let inner2 = switch(e3, e4)?;
    check_same_square("coherent superposition of switches", &inner1, &inner2)?;
    check_amps("outer amplitudes (first branch)", inner1.kraus_count(), outer_amps_a)?;
    check_amps("outer amplitudes (second branch)", inner2.kraus_count(), outer_amps_b)?;
    composite(
        coherent_kraus(inner1.kraus(), outer_amps_a, inner2.kraus(), outer_amps_b),
        format!("cos({}, {})", inner1.label(), inner2.label()),
    )
}

/// Freezes the control register at a pure state, giving a channel from the
/// target alone to the full output: `A_μ = M_μ (|c⟩ ⊗ 𝕀)`.
pub fn fix_control(ch: &Channel, control: &ControlState) -> Result<Channel> {
    let ket = control.ket()?;
    let dc = control.dim();
    if ch.d_in() % dc != 0 {
        return Err(Error::DimensionMismatch(format!(
            "control of dimension {dc} does not divide channel input dimension {}",
            ch.d_in()
        )));
    }
    let dt = ch.d_in() / dc;
    let embed = tensor(&ket, &ComplexMatrix::identity(dt));
    let kraus = ch.kraus().iter().map(|m| m * &embed).collect();
    composite(kraus, format!("fixed[{}]", ch.label()))
}

/// Discards the leading `control_dim`-dimensional register of a channel's
/// output: Kraus operators `(⟨a| ⊗ 𝕀) A_μ` for every control basis state `a`.
pub fn trace_out_control(ch: &Channel, control_dim: usize) -> Result<Channel> {
    if control_dim == 0 || ch.d_out() % control_dim != 0 {
        return Err(Error::DimensionMismatch(format!(
            "control of dimension {control_dim} does not divide output dimension {}",
            ch.d_out()
        )));
    }
    let dt = ch.d_out() / control_dim;
    let mut kraus = Vec::with_capacity(ch.kraus_count() * control_dim);
    for a in 0..control_dim {
        let mut bra = ComplexMatrix::zeros(1, control_dim);
        bra[(0, a)] = ONE;
        let project = tensor(&bra, &ComplexMatrix::identity(dt));
        for k in ch.kraus() {
            kraus.push(&project * k);
        }
    }
    composite(kraus, format!("target[{}]", ch.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bit_flip, depolarizing, phase_flip, vacuum_extend};
    use crate::qmatrix::testutil::random_state;
    use crate::qmatrix::{c, partial_trace, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vac(ch: &Channel) -> VacuumExtendedChannel {
        vacuum_extend(ch, &VacuumAmplitudes::concentrated(ch.kraus_count())).unwrap()
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.max_abs_diff(b).unwrap()
    }

    /// All six configurations over one channel family, default amplitudes.
    fn all_kinds(e: [&Channel; 4]) -> Vec<(SupermapKind, Channel)> {
        let v: Vec<_> = e.iter().map(|c| vac(c)).collect();
        let conc = |n| VacuumAmplitudes::concentrated(n);
        let n12 = e[0].kraus_count() * e[1].kraus_count();
        let n34 = e[2].kraus_count() * e[3].kraus_count();
        vec![
            (SupermapKind::Switch, switch(e[0], e[1]).unwrap()),
            (SupermapKind::CoherentSup, coherent_superposition(&v[0], &v[1]).unwrap()),
            (SupermapKind::SwitchOfSwitch, switch_of_switch(e[0], e[1], e[2], e[3]).unwrap()),
            (SupermapKind::SwitchOfCoh, switch_of_coh(&v[0], &v[1], &v[2], &v[3]).unwrap()),
            (
                SupermapKind::CohOfSwitch,
                coh_of_switch(e[0], e[1], e[2], e[3], &conc(n12), &conc(n34)).unwrap(),
            ),
            (
                SupermapKind::CohOfCoh,
                coh_of_coh(&v[0], &v[1], &v[2], &v[3], &conc(n12), &conc(n34)).unwrap(),
            ),
        ]
    }

    #[test]
    fn tokens_round_trip() {
        for k in SupermapKind::ALL {
            assert_eq!(k.token().parse::<SupermapKind>().unwrap(), k);
        }
        assert!("switcheroo".parse::<SupermapKind>().is_err());
    }

    #[test]
    fn switch_of_two_bit_flips() {
        let p = 0.3;
        let e = bit_flip(p).unwrap();
        let s = switch(&e, &e).unwrap();
        assert_eq!(s.kraus_count(), 4);
        assert_eq!((s.d_in(), s.d_out()), (4, 4));
        let i4 = ComplexMatrix::identity(4);
        assert!(max_diff(&s.kraus()[0], &i4.scale_real(1.0 - p)) < 1e-15);
        assert!(max_diff(&s.kraus()[3], &i4.scale_real(p)) < 1e-15);
    }

    #[test]
    fn switch_of_identities_is_identity() {
        let id = Channel::identity(2);
        let s = switch(&id, &id).unwrap();
        assert_eq!(s.kraus(), &[ComplexMatrix::identity(4)]);
    }

    #[test]
    fn switch_rejects_mismatched_dimensions() {
        let e = bit_flip(0.1).unwrap();
        assert!(matches!(
            switch(&e, &Channel::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn coherent_superposition_matches_worked_bit_flip_list() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = 0.2;
        let e = bit_flip(p).unwrap();
        let amps = VacuumAmplitudes::from_reals(&[h, h]).unwrap();
        let ext = vacuum_extend(&e, &amps).unwrap();
        let n = coherent_superposition(&ext, &ext).unwrap();
        assert_eq!(n.kraus_count(), 4);
        let k = e.kraus();
        for i in 0..2 {
            for j in 0..2 {
                let expect = direct_sum(&k[i], &k[j]).scale_real(h);
                assert!(max_diff(&n.kraus()[2 * i + j], &expect) < 1e-15);
            }
        }
        assert!(n.verify_completeness(1e-10));
    }

    #[test]
    fn coherent_superposition_of_identities() {
        let one = VacuumAmplitudes::concentrated(1);
        let id = vacuum_extend(&Channel::identity(2), &one).unwrap();
        let n = coherent_superposition(&id, &id).unwrap();
        assert_eq!(n.kraus(), &[ComplexMatrix::identity(4)]);
    }

    #[test]
    fn coherent_superposition_complete_for_random_amplitudes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let p: f64 = rng.random();
            let mut raw: Vec<C64> = (0..4)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            raw.iter_mut().for_each(|z| *z /= norm);
            let amps = VacuumAmplitudes::new(raw).unwrap();
            let ext = vacuum_extend(&depolarizing(p).unwrap(), &amps).unwrap();
            let ext2 = vacuum_extend(&depolarizing(1.0 - p).unwrap(), &amps).unwrap();
            let n = coherent_superposition(&ext, &ext2).unwrap();
            assert!(n.completeness_defect() <= 1e-10);
        }
    }

    #[test]
    fn nested_kraus_counts() {
        let e = bit_flip(0.4).unwrap();
        for (kind, ch) in all_kinds([&e, &e, &e, &e]) {
            let expect = if kind.is_nested() { 16 } else { 4 };
            assert_eq!(ch.kraus_count(), expect, "{kind}");
            let dim = if kind.is_nested() { 8 } else { 4 };
            assert_eq!((ch.d_in(), ch.d_out()), (dim, dim), "{kind}");
        }
        let d = depolarizing(0.4).unwrap();
        let b = bit_flip(0.4).unwrap();
        let mixed = all_kinds([&d, &b, &d, &b]);
        assert_eq!(mixed[0].1.kraus_count(), 8);
        assert_eq!(mixed[2].1.kraus_count(), 64);
    }

    #[test]
    fn nested_noiseless_limits_are_identity() {
        let e = bit_flip(0.0).unwrap();
        let sos = switch_of_switch(&e, &e, &e, &e).unwrap();
        assert!(max_diff(&sos.kraus()[0], &ComplexMatrix::identity(8)) < 1e-15);

        let id = Channel::identity(2);
        let one = VacuumAmplitudes::concentrated(1);
        let v = vacuum_extend(&id, &one).unwrap();
        let coc = coh_of_coh(&v, &v, &v, &v, &one, &one).unwrap();
        assert_eq!(coc.kraus(), &[ComplexMatrix::identity(8)]);
        let soc = switch_of_coh(&v, &v, &v, &v).unwrap();
        assert_eq!(soc.kraus(), &[ComplexMatrix::identity(8)]);
        let cos = coh_of_switch(&id, &id, &id, &id, &one, &one).unwrap();
        assert_eq!(cos.kraus(), &[ComplexMatrix::identity(8)]);
        let sos = switch_of_switch(&id, &id, &id, &id).unwrap();
        assert_eq!(sos.kraus(), &[ComplexMatrix::identity(8)]);
    }

    #[test]
    fn outer_amplitudes_are_validated() {
        let e = bit_flip(0.2).unwrap();
        let bad = VacuumAmplitudes::concentrated(3);
        let ok = VacuumAmplitudes::concentrated(4);
        assert!(coh_of_switch(&e, &e, &e, &e, &bad, &ok).is_err());
        let v = vac(&e);
        assert!(coh_of_coh(&v, &v, &v, &v, &ok, &bad).is_err());
    }

    #[test]
    fn every_configuration_is_complete_on_the_grid() {
        for step in 0..=10 {
            let p = step as f64 / 10.0;
            let b = bit_flip(p).unwrap();
            let z = phase_flip(p).unwrap();
            let d = depolarizing(p).unwrap();
            for family in [[&b, &b, &b, &b], [&z, &z, &z, &z], [&b, &z, &b, &z], [&b, &b, &z, &z], [&d, &d, &d, &d]] {
                for (kind, ch) in all_kinds(family) {
                    assert!(ch.completeness_defect() <= 1e-10, "{kind} at p = {p}");
                    let fixed = fix_control(&ch, &ControlState::default_for(kind)).unwrap();
                    assert!(fixed.completeness_defect() <= 1e-10, "fixed {kind} at p = {p}");
                    assert_eq!(fixed.d_in(), 2);
                }
            }
        }
    }

    #[test]
    fn fix_control_of_identity_switch() {
        let id = Channel::identity(2);
        let s = switch(&id, &id).unwrap();
        let fixed = fix_control(&s, &ControlState::plus(1)).unwrap();
        let rho = DensityMatrix::from_bloch(0.1, 0.5, -0.3).unwrap();
        let out = fixed.apply(&rho).unwrap();
        let expect = DensityMatrix::plus().tensor(&rho);
        assert!(max_diff(out.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn fix_control_agrees_with_joint_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = bit_flip(0.3).unwrap();
        let d = depolarizing(0.6).unwrap();
        for (kind, ch) in all_kinds([&b, &d, &d, &b]) {
            let control = ControlState::default_for(kind);
            let fixed = fix_control(&ch, &control).unwrap();
            for _ in 0..5 {
                let rho = random_state(&mut rng, 2);
                let via_fixed = fixed.apply(&rho).unwrap();
                let joint = ch.apply(&control.state().tensor(&rho)).unwrap();
                assert!(max_diff(via_fixed.matrix(), joint.matrix()) <= 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn fix_control_rejects_mixed_or_misfit_controls() {
        let e = bit_flip(0.3).unwrap();
        let s = switch(&e, &e).unwrap();
        let mixed = ControlState::new(DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(matches!(fix_control(&s, &mixed), Err(Error::MixedControl(_))));
        let three = Channel::identity(3);
        assert!(fix_control(&three, &ControlState::plus(1)).is_err());
        assert!(ControlState::new(DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn noiseless_collapse_for_every_configuration() {
        let b = bit_flip(0.0).unwrap();
        let d = depolarizing(0.0).unwrap();
        let rho = DensityMatrix::from_bloch(0.3, -0.4, 0.5).unwrap();
        for family in [[&b, &b, &b, &b], [&d, &d, &d, &d]] {
            for (kind, ch) in all_kinds(family) {
                let control = ControlState::default_for(kind);
                let out = fix_control(&ch, &control).unwrap().apply(&rho).unwrap();
                let expect = control.state().tensor(&rho);
                assert!(max_diff(out.matrix(), expect.matrix()) <= 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn switch_is_symmetric_for_identical_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for p in [0.1, 0.45, 0.8] {
            let e = depolarizing(p).unwrap();
            let e_copy = depolarizing(p).unwrap();
            let a = fix_control(&switch(&e, &e_copy).unwrap(), &ControlState::plus(1)).unwrap();
            let b = fix_control(&switch(&e_copy, &e).unwrap(), &ControlState::plus(1)).unwrap();
            let rho = random_state(&mut rng, 2);
            let diff = max_diff(a.apply(&rho).unwrap().matrix(), b.apply(&rho).unwrap().matrix());
            assert!(diff <= 1e-12);
        }
    }

    #[test]
    fn classical_controls_reduce_to_sequential_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let e1 = bit_flip(0.3).unwrap();
        let e2 = crate::channels::pauli(0.1, 0.25, 0.05).unwrap();
        let s = switch(&e1, &e2).unwrap();
        for _ in 0..20 {
            let rho = random_state(&mut rng, 2);
            let zero = fix_control(&s, &ControlState::basis(2, 0).unwrap()).unwrap();
            let out0 = partial_trace(&zero.apply(&rho).unwrap(), &[2, 2], &[1]).unwrap();
            let seq12 = e2.apply(&e1.apply(&rho).unwrap()).unwrap();
            assert!(max_diff(out0.matrix(), seq12.matrix()) <= 1e-12);

            let one = fix_control(&s, &ControlState::basis(2, 1).unwrap()).unwrap();
            let out1 = partial_trace(&one.apply(&rho).unwrap(), &[2, 2], &[1]).unwrap();
            let seq21 = e1.apply(&e2.apply(&rho).unwrap()).unwrap();
            assert!(max_diff(out1.matrix(), seq21.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn trace_out_control_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let b = bit_flip(0.35).unwrap();
        let z = phase_flip(0.2).unwrap();
        for (kind, ch) in all_kinds([&b, &z, &b, &z]) {
            let control = ControlState::default_for(kind);
            let fixed = fix_control(&ch, &control).unwrap();
            let target = trace_out_control(&fixed, control.dim()).unwrap();
            assert!(target.completeness_defect() <= 1e-10);
            let rho = random_state(&mut rng, 2);
            let full = fixed.apply(&rho).unwrap();
            let reduced = partial_trace(&full, &[control.dim(), 2], &[1]).unwrap();
            let direct = target.apply(&rho).unwrap();
            assert!(max_diff(reduced.matrix(), direct.matrix()) <= 1e-12, "{kind}");
        }
    }
}
