use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension must be positive, got {0}")]
    InvalidDimension(i64),

    #[error("expected {expected} generator images, got {found}")]
    ImageCountMismatch { expected: usize, found: usize },

    #[error("generator image {index} is not unitary (residual {residual:.3e})")]
    NonUnitaryImage { index: usize, residual: f64 },

    #[error("generator images do not define a homomorphism (residual {residual:.3e})")]
    InconsistentImages { residual: f64 },

    #[error("representations are defined on different groups")]
    GroupMismatch,

    #[error("representations are defined over different fields")]
    FieldMismatch,

    #[error("{0}")]
    UnsupportedField(String),

    #[error("operation requires a finite group")]
    NotFinite,

    #[error("partial average over an empty set")]
    EmptySet,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("commutant projection did not converge: residual {residual:.3e} after {rounds} rounds")]
    ProjectionDidNotConverge { residual: f64, rounds: usize },

    /// A genericity assumption failed; the caller should retry with fresh samples.
    #[error("genericity violation: {0}")]
    Genericity(String),

    #[error("decomposition failed after {attempts} attempts: {last}")]
    ResampleBudgetExhausted { attempts: usize, last: String },

    #[error("matrix is not invariant: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotInvariant { residual: f64, tol: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Whether drawing fresh random samples may make the failing step succeed.
    pub fn is_resample_signal(&self) -> bool {
        matches!(
            self,
            Error::Genericity(_) | Error::ProjectionDidNotConverge { .. }
        )
    }
}
