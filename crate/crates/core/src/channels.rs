//! Kraus-operator channels, the qubit noise catalog and vacuum extension.

use std::fmt;

use crate::error::{Error, Result};
use crate::qmatrix::{c, direct_sum, ComplexMatrix, DensityMatrix, C64, STATE_TOL};

/// A CPTP map `ρ ↦ Σ K ρ K†` given by its Kraus operators, each `d_out × d_in`.
#[derive(Clone, PartialEq)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
    label: String,
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Channel")
            .field("label", &self.label)
            .field("d_in", &self.d_in)
            .field("d_out", &self.d_out)
            .field("kraus_count", &self.kraus.len())
            .finish()
    }
}

impl Channel {
    /// Builds a channel, checking shapes and completeness within 1e-10.
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus, label)?;
        let defect = ch.completeness_defect();
        if defect > STATE_TOL {
            return Err(Error::Domain(format!(
                "Kraus operators of `{}` violate completeness by {defect:e}",
                ch.label
            )));
        }
        Ok(ch)
    }

    /// Builds a channel checking shapes only. Supermap constructors use this and
    /// leave completeness to the caller's tests.
    pub(crate) fn from_kraus_unchecked(
        kraus: Vec<ComplexMatrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        let first = kraus
            .first()
            .ok_or_else(|| Error::Domain(format!("channel `{label}` has no Kraus operators")))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if let Some(bad) = kraus.iter().find(|k| k.rows() != d_out || k.cols() != d_in) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators of `{label}` disagree in shape: {d_out}x{d_in} vs {}x{}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self {
            kraus,
            d_in,
            d_out,
            label,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
            d_in: dim,
            d_out: dim,
            label: "identity".into(),
        }
    }

    #[inline]
    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    #[inline]
    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    #[inline]
    pub fn d_in(&self) -> usize {
        self.d_in
    }

    #[inline]
    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Max-abs deviation of `Σ K†K` from the identity on the input space.
    pub fn completeness_defect(&self) -> f64 {
        completeness_defect(&self.kraus)
    }

    pub fn verify_completeness(&self, tol: f64) -> bool {
        verify_completeness(&self.kraus, tol)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix())?))
    }

    /// `Σ K x K†` for any `d_in × d_in` operator `x`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d_in || x.cols() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "channel `{}` takes {}-dimensional input, got {}x{}",
                self.label,
                self.d_in,
                x.rows(),
                x.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out.add_assign_checked(&k.sandwich(x)?)?;
        }
        Ok(out)
    }
}

/// Max-abs deviation of `Σ K†K` from the identity; infinite for an empty or ragged list.
pub fn completeness_defect(kraus: &[ComplexMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let d_in = first.cols();
    if kraus.iter().any(|k| k.cols() != d_in || k.rows() != first.rows()) {
        return f64::INFINITY;
    }
    let mut sum = ComplexMatrix::zeros(d_in, d_in);
    for k in kraus {
        sum.add_assign_checked(&(&k.dagger() * k)).expect("square by construction");
    }
    sum.max_abs_diff(&ComplexMatrix::identity(d_in))
        .expect("same shape")
}

/// True iff `Σ K†K` is within `tol` of the identity, entrywise.
pub fn verify_completeness(kraus: &[ComplexMatrix], tol: f64) -> bool {
    completeness_defect(kraus) <= tol
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("{name} = {p} is not a probability in [0, 1]")));
    }
    Ok(())
}

/// `K₀ = √(1−p) 𝕀`, `K₁ = √p σx`.
pub fn bit_flip(p: f64) -> Result<Channel> {
    check_probability("p", p)?;
    Ok(Channel {
        kraus: vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            ComplexMatrix::pauli_x().scale_real(p.sqrt()),
        ],
        d_in: 2,
        d_out: 2,
        label: format!("bit_flip({p})"),
    })
}

/// `K₀ = √(1−p) 𝕀`, `K₁ = √p σz`.
pub fn phase_flip(p: f64) -> Result<Channel> {
    check_probability("p", p)?;
    Ok(Channel {
        kraus: vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            ComplexMatrix::pauli_z().scale_real(p.sqrt()),
        ],
        d_in: 2,
        d_out: 2,
        label: format!("phase_flip({p})"),
    })
}

/// Pauli channel with Kraus operators `√(1−p) 𝕀, √px σx, √py σy, √pz σz`, `p = px + py + pz`.
pub fn pauli(px: f64, py: f64, pz: f64) -> Result<Channel> {
    for (name, v) in [("px", px), ("py", py), ("pz", pz)] {
        check_probability(name, v)?;
    }
    let p = px + py + pz;
    if p > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "px + py + pz = {p} exceeds 1"
        )));
    }
    let p = p.min(1.0);
    Ok(Channel {
        kraus: vec![
            ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
            ComplexMatrix::pauli_x().scale_real(px.sqrt()),
            ComplexMatrix::pauli_y().scale_real(py.sqrt()),
            ComplexMatrix::pauli_z().scale_real(pz.sqrt()),
        ],
        d_in: 2,
        d_out: 2,
        label: format!("pauli({px}, {py}, {pz})"),
    })
}

/// Pauli channel with `px = py = pz = p/3`.
pub fn depolarizing(p: f64) -> Result<Channel> {
    check_probability("p", p)?;
    let ch = pauli(p / 3.0, p / 3.0, p / 3.0)?;
    Ok(ch.with_label(format!("depolarizing({p})")))
}

/// Normalized per-Kraus vacuum amplitudes `γᵢ`, `Σ|γᵢ|² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct VacuumAmplitudes {
    amps: Vec<C64>,
}

impl VacuumAmplitudes {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Unnormalized(0.0));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::Unnormalized(norm));
        }
        Ok(Self { amps })
    }

    pub fn from_reals(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| c(a, 0.0)).collect())
    }

    /// `(1, 0, …, 0)`: only the first Kraus operator acts on the vacuum.
    pub fn concentrated(len: usize) -> Self {
        assert!(len > 0);
        let mut amps = vec![c(0.0, 0.0); len];
        amps[0] = c(1.0, 0.0);
        Self { amps }
    }

    /// All amplitudes equal to `1/√len`.
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        let a = 1.0 / (len as f64).sqrt();
        Self {
            amps: vec![c(a, 0.0); len],
        }
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.amps
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }
}

/// Channel extended by one vacuum dimension (the last basis vector):
/// `K̃ᵢ = Kᵢ ⊕ γᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VacuumExtendedChannel {
    base: Channel,
    amps: VacuumAmplitudes,
    extended: Vec<ComplexMatrix>,
}

impl VacuumExtendedChannel {
    pub fn base(&self) -> &Channel {
        &self.base
    }

    pub fn amps(&self) -> &VacuumAmplitudes {
        &self.amps
    }

    pub fn extended_kraus(&self) -> &[ComplexMatrix] {
        &self.extended
    }

    /// The extension as an ordinary channel on `d_in + 1` dimensions.
    pub fn as_channel(&self) -> Channel {
        Channel {
            kraus: self.extended.clone(),
            d_in: self.base.d_in + 1,
            d_out: self.base.d_out + 1,
            label: format!("vac({})", self.base.label),
        }
    }
}

pub fn vacuum_extend(ch: &Channel, amps: &VacuumAmplitudes) -> Result<VacuumExtendedChannel> {
    if amps.len() != ch.kraus_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} vacuum amplitudes for {} Kraus operators of `{}`",
            amps.len(),
            ch.kraus_count(),
            ch.label
        )));
    }
    // Re-check: amplitudes may have been built in-crate without validation.
    VacuumAmplitudes::new(amps.as_slice().to_vec())?;
    let extended = ch
        .kraus
        .iter()
        .zip(amps.as_slice())
        .map(|(k, &g)| direct_sum(k, &ComplexMatrix::new(1, 1, vec![g]).expect("1x1")))
        .collect();
    Ok(VacuumExtendedChannel {
        base: ch.clone(),
        amps: amps.clone(),
        extended,
    })
}
