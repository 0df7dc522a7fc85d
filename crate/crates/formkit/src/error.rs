use thiserror::Error;

/// Coarse classification of failures, used by callers (notably the CLI)
/// to distinguish violated structural invariants from unmet operation
/// preconditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A value does not satisfy the invariants of its type
    /// (non-Hermitian matrix, non-orthonormal basis, dimension mismatch, ...).
    Invariant,
    /// The inputs are well-formed but the operation's precondition fails
    /// (shift above the lower bound, vector outside the domain, ...).
    Precondition,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error(
        "matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} below clamp -{clamp:.3e}"
    )]
    NotPsd { eigenvalue: f64, clamp: f64 },
    #[error("matrix is not a nonnegative contraction: eigenvalue {eigenvalue:.6e} outside [0, 1]")]
    NotContraction { eigenvalue: f64 },
    #[error("basis columns are not orthonormal: defect {defect:.3e} exceeds {tol:.3e}")]
    NotOrthonormal { defect: f64, tol: f64 },
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("domains differ")]
    DomainMismatch,
    #[error("representing-map shifts differ: {left} vs {right}")]
    ShiftMismatch { left: f64, right: f64 },
    #[error("{c} is not a lower bound of the form (m = {m})")]
    NotLowerBound { c: f64, m: f64 },
    #[error("vector lies outside the form domain: residual {residual:.3e}")]
    NotInDomain { residual: f64 },
    #[error("relation has a nontrivial multivalued part where an operator is required")]
    Multivalued,
    #[error("relation is not selfadjoint: graph defect {defect:.3e}")]
    NotSelfadjoint { defect: f64 },
    #[error("bad argument: {context}")]
    BadArgument { context: String },
    #[error("representing maps realize different forms: defect {defect:.3e}")]
    DifferentForms { defect: f64 },
    #[error("summands do not add up to the decomposed form: defect {defect:.3e}")]
    InconsistentSum { defect: f64 },
    #[error("sequence has the wrong sense: expected {expected}")]
    SenseMismatch { expected: &'static str },
    #[error("form sequence is not monotone at index {index}")]
    NotMonotone { index: usize },
    #[error("chain does not stabilize within its {len} entries")]
    NoStabilization { len: usize },
    #[error("spectral point {lambda} is not below the lower bound {bound}")]
    LambdaAboveBound { lambda: f64, bound: f64 },
    #[error("invalid tolerance: {context}")]
    InvalidTolerance { context: String },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotLowerBound { .. }
            | Error::NotInDomain { .. }
            | Error::LambdaAboveBound { .. }
            | Error::SenseMismatch { .. }
            | Error::NoStabilization { .. }
            | Error::BadArgument { .. } => ErrorKind::Precondition,
            _ => ErrorKind::Invariant,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
