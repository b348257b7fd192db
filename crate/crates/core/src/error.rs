use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("eigenvalue {0:e} is below the PSD slack of -1e-10")]
    NegativeEigenvalue(f64),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("vacuum amplitudes are not normalized: sum |γ|² = {0}")]
    Unnormalized(f64),

    #[error("control state must be pure (purity {0})")]
    MixedControl(f64),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("no closed form for {requested}; available: {available}")]
    UnmappedClosedForm { requested: String, available: String },

    #[error("unknown token `{0}`")]
    UnknownToken(String),
}
