use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("matrix is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },
    #[error("nonpositive eigenvalue {value:.3e}")]
    NonPositiveEigenvalue { value: f64 },
    #[error("eigenbasis is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("antilinear map is not an involution (residual {residual:.3e})")]
    NotInvolution { residual: f64 },
    #[error("modular relation J Delta J = Delta^-1 violated (residual {residual:.3e})")]
    ModularRelation { residual: f64 },
    #[error("twist norm {norm:.6} exceeds 1")]
    NormTooLarge { norm: f64 },
    #[error("P_{level} has eigenvalue {value:.3e} below tolerance: not a twist up to this level")]
    NegativeEigenvalue { level: usize, value: f64 },
    #[error("resource guard: {what} = {size} exceeds limit {limit}")]
    ResourceGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("unknown gallery twist `{0}`")]
    UnknownGallery(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("kernel stability fails at level {level} (residual {residual:.3e})")]
    KernelStability { level: usize, residual: f64 },
    #[error("precondition `{what}` violated (residual {residual:.3e})")]
    Precondition { what: &'static str, residual: f64 },
    #[error("truncation N = {available} too small, need {needed}")]
    Truncation { needed: usize, available: usize },
    #[error("twist is not braided (residual {residual:.3e}); diagram evaluation needs n <= 3")]
    NotBraided { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
