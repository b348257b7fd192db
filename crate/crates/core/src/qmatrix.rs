//! Dense complex linear algebra sized for small composite systems.
//!
//! Everything here is row-major with explicit dimensions. Nothing broadcasts:
//! every binary operation checks shapes and fails loudly on a mismatch,
//! because composing supermaps is mostly an exercise in getting the
//! dimensions right.

use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
pub use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Tolerance used for Hermiticity, trace and PSD checks on states.
pub const STATE_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self::diag(&entries.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    /// Column vector from amplitudes.
    pub fn ket(amps: &[C64]) -> Self {
        Self {
            rows: amps.len(),
            cols: 1,
            data: amps.to_vec(),
        }
    }

    /// `|basis⟩` in a `dim`-dimensional space.
    pub fn basis_ket(dim: usize, basis: usize) -> Self {
        assert!(basis < dim);
        let mut m = Self::zeros(dim, 1);
        m.data[basis] = ONE;
        m
    }

    /// Outer product `|a⟩⟨b|` of two column vectors.
    pub fn outer(a: &Self, b: &Self) -> Result<Self> {
        if a.cols != 1 || b.cols != 1 {
            return Err(Error::DimensionMismatch(
                "outer product needs column vectors".into(),
            ));
        }
        Ok(a.matmul(&b.dagger()).expect("column shapes checked"))
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::new(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for col in 0..self.cols {
                out.data[col * self.rows + r] = self.data[r * self.cols + col].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · x · self†`.
    pub fn sandwich(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.dagger())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs, "subtract")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub(crate) fn add_assign_checked(&mut self, rhs: &Self) -> Result<()> {
        self.check_same_shape(rhs, "accumulate")?;
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(c(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        self.check_same_shape(rhs, "compare")?;
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus of `self - self†`; infinite for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Spectral norm, from the largest eigenvalue of `A†A`.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.dagger().matmul(self).expect("A†A is always defined");
        let top = eig_hermitian_unchecked(&gram).last().copied().unwrap_or(0.0);
        top.max(0.0).sqrt()
    }

    fn check_same_shape(&self, rhs: &Self, what: &str) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        assert!(r < self.rows && col < self.cols, "index out of bounds");
        &self.data[r * self.cols + col]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && col < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + col]
    }
}

/// Panicking product for call sites whose shapes are fixed by construction.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

/// Kronecker product `a ⊗ b`; block `(i, j)` is `a[i, j] · b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a.data[ar * a.cols + ac];
            if s == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let row = ar * b.rows + br;
                for bc in 0..b.cols {
                    out.data[row * cols + ac * b.cols + bc] = s * b.data[br * b.cols + bc];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list, left to right.
pub fn tensor_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let (first, rest) = factors.split_first().expect("need at least one factor");
    rest.iter().fold((*first).clone(), |acc, f| tensor(&acc, f))
}

/// Block-diagonal `diag(a, b)`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows + b.rows;
    let cols = a.cols + b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for r in 0..a.rows {
        out.data[r * cols..r * cols + a.cols].copy_from_slice(&a.data[r * a.cols..(r + 1) * a.cols]);
    }
    for r in 0..b.rows {
        let row = a.rows + r;
        out.data[row * cols + a.cols..(row + 1) * cols]
            .copy_from_slice(&b.data[r * b.cols..(r + 1) * b.cols]);
    }
    out
}

/// Real spectrum of a Hermitian matrix, ascending.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = h.hermiticity_defect();
    if defect > STATE_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(eig_hermitian_unchecked(h))
}

pub(crate) fn eig_hermitian_unchecked(h: &ComplexMatrix) -> Vec<f64> {
    if h.rows == 1 {
        return vec![h.data[0].re];
    }
    let mut vals: Vec<f64> = h
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Principal square root of a Hermitian PSD matrix; small negative eigenvalues are clamped.
pub fn sqrt_psd(h: &ComplexMatrix) -> ComplexMatrix {
    if h.rows == 1 {
        return ComplexMatrix::diag_real(&[h.data[0].re.max(0.0).sqrt()]);
    }
    let eig = h.to_nalgebra().symmetric_eigen();
    let n = h.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        for r in 0..n {
            for col in 0..n {
                out[(r, col)] += v[r] * v[col].conj() * s;
            }
        }
    }
    out
}

/// Entropy in bits of a spectrum with unit sum.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero, anything more negative is an error.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lambda in eigenvalues {
        if lambda < -STATE_TOL {
            return Err(Error::NegativeEigenvalue(lambda));
        }
        let l = lambda.clamp(0.0, 1.0);
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Entropy in bits of a Hermitian PSD matrix that is not wrapped as a [`DensityMatrix`].
pub(crate) fn hermitian_entropy(m: &ComplexMatrix) -> Result<f64> {
    entropy_of_spectrum(&eig_hermitian_unchecked(m))
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, each within 1e-10.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let low = eig_hermitian_unchecked(&matrix)[0];
        if low < -STATE_TOL {
            return Err(Error::NegativeEigenvalue(low));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix known to be a state by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("ket has squared norm {norm}")));
        }
        let k = ComplexMatrix::ket(ket);
        Ok(Self::from_trusted(&k * &k.dagger()))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let k = ComplexMatrix::basis_ket(dim, index);
        Self::from_trusted(&k * &k.dagger())
    }

    /// `|+⟩⟨+|` on a single qubit.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure(&[c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// Qubit state from a Bloch vector with `|r| ≤ 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r2 = x * x + y * y + z * z;
        if r2 > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("Bloch vector has length {}", r2.sqrt())));
        }
        Ok(Self::from_trusted(bloch_matrix(x, y, z)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian_unchecked(&self.matrix)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_trusted(tensor(&self.matrix, &other.matrix))
    }

    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        partial_trace(self, dims, keep)
    }
}

pub(crate) fn bloch_matrix(x: f64, y: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            c(0.5 * (1.0 + z), 0.0),
            c(0.5 * x, -0.5 * y),
            c(0.5 * x, 0.5 * y),
            c(0.5 * (1.0 - z), 0.0),
        ],
    )
    .expect("2x2 shape")
}

/// Reduced state on the subsystems listed in `keep`, in their original order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not factor a {}-dimensional state",
            rho.dim()
        )));
    }
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep set {keep:?} must be a non-empty subset of 0..{}",
            dims.len()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::DimensionMismatch(format!("keep set {keep:?} repeats an index")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // Offset in the full space contributed by a multi-index over a subset of subsystems.
    let offset = |subset: &[usize], sub_dims: &[usize], mut flat: usize| -> usize {
        let mut off = 0;
        for (pos, &sys) in subset.iter().enumerate().rev() {
            let d = sub_dims[pos];
            off += (flat % d) * strides[sys];
            flat /= d;
        }
        off
    };
    let kept_off: Vec<usize> = (0..out_dim).map(|a| offset(&kept, &kept_dims, a)).collect();
    let env_off: Vec<usize> = (0..env_dim).map(|e| offset(&traced, &traced_dims, e)).collect();

    let full = rho.matrix();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut acc = ZERO;
            for &e in &env_off {
                acc += full[(kept_off[a] + e, kept_off[b] + e)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// Von Neumann entropy in bits, `-Σ λ log₂ λ` with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    // A validated state has no eigenvalue below the slack.
    entropy_of_spectrum(&rho.eigenvalues()).unwrap_or(0.0)
}
