use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NonHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e} below clamp window)")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operator is not power stable (spectral radius {spectral_radius:.6})")]
    Unstable { spectral_radius: f64 },

    #[error("spectral radius {spectral_radius:.12} lies in the borderline band around 1; no finite-dimensional verdict")]
    Borderline { spectral_radius: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular at tolerance (condition number {condition:.3e})")]
    Singular { condition: f64 },

    #[error("tail bound {bound:.3e} exceeds requested tolerance {requested:.3e}")]
    TailNotCertified { bound: f64, requested: f64 },

    #[error("system is not a frame (lower bound {lower:.3e}, upper bound {upper:.3e})")]
    NotAFrame { lower: f64, upper: f64 },

    #[error("operator is not a contraction (norm {norm:.12})")]
    NotContraction { norm: f64 },

    #[error("operator does not admit a Parseval frame of iterations: {0}")]
    NotAdmissible(String),

    #[error("shift overflows the truncation: top-degree coefficient is nonzero")]
    Overflow,

    #[error("degree {degree} exceeds truncation cutoff {cutoff}")]
    DegreeOverflow { degree: usize, cutoff: usize },

    #[error("cutoff {cutoff} is below the required minimum {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("model space is degenerate (dimension 0)")]
    Degenerate,

    #[error("subspace is not shift invariant (defect {defect:.3e} > {tol:.3e})")]
    NotInvariant { defect: f64, tol: f64 },

    #[error("value {re}+{im}i is not inside the open unit disc")]
    NotInDisc { re: f64, im: f64 },

    #[error("similarity verdicts disagree: coefficient test {coefficient}, zero-set test {zero_set}")]
    VerdictMismatch { coefficient: bool, zero_set: bool },

    #[error("index certificate failed: {0}")]
    CertificateFailed(String),

    #[error("no frame witness found after {attempts} attempts")]
    WitnessFailed { attempts: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of a numerical certificate, as opposed to
    /// rejected inputs or violated preconditions.
    pub fn is_certificate_failure(&self) -> bool {
        matches!(
            self,
            Error::CertificateFailed(_)
                | Error::VerdictMismatch { .. }
                | Error::TailNotCertified { .. }
                | Error::WitnessFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
