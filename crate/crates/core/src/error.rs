use thiserror::Error;

/// Errors raised anywhere in the bound pipeline.
///
/// Every variant maps to a stable machine-readable [`Error::kind`] and a
/// process exit code so the CLI can report failures without string matching.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("trace deviates from 1 (trace = {trace})")]
    TraceDeviation { trace: f64 },

    #[error("negative eigenvalue {value:e} below tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("party index {index} out of range for {parties} parties")]
    BadPartyIndex { index: usize, parties: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative probability {value:e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    ProbabilitySum { sum: f64 },

    #[error("basis has {got} vectors, space dimension is {expected}")]
    IncompleteBasis { got: usize, expected: usize },

    #[error("basis is not orthonormal (max Gram deviation {deviation:e})")]
    NonOrthonormal { deviation: f64 },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation failed{}: {source}", member.map(|i| format!(" for member {i}")).unwrap_or_default())]
    Validation {
        member: Option<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("isometry rows are not orthonormal (max deviation {deviation:e})")]
    NonIsometric { deviation: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("output entanglement term must be nonnegative, got {value}")]
    NegativeEoutTerm { value: f64 },

    #[error("quadrature requires a qubit first party, got dims {dims:?}")]
    QuadratureUnsupported { dims: Vec<usize> },

    #[error("sample budget {got} below minimum {min}")]
    SampleBudgetTooSmall { got: usize, min: usize },

    #[error("average state is not a product state (max deviation {deviation:e})")]
    AverageNotProduct { deviation: f64 },

    #[error("consistency failure: product-average value {product_form} vs direct {direct} (|diff| {diff:e} > tolerance {tolerance:e})")]
    ConsistencyFailure {
        product_form: f64,
        direct: f64,
        diff: f64,
        tolerance: f64,
    },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("decomposition is not Bell-diagonal: member {index} is not a canonical Bell state")]
    NotBellDiagonal { index: usize },

    #[error("optimizer budget exhausted after {evaluations} evaluations")]
    BudgetExhausted { evaluations: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier used in error JSON payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitian { .. } => "NonHermitian",
            Error::TraceDeviation { .. } => "TraceDeviation",
            Error::NegativeEigenvalue { .. } => "NegativeEigenvalue",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BadPartyIndex { .. } => "BadPartyIndex",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NonFinite { .. } => "NonFinite",
            Error::NegativeProbability { .. } => "NegativeProbability",
            Error::ProbabilitySum { .. } => "ProbabilitySum",
            Error::IncompleteBasis { .. } => "IncompleteBasis",
            Error::NonOrthonormal { .. } => "NonOrthonormal",
            Error::Schema(_) => "SchemaError",
            Error::Validation { .. } => "ValidationError",
            Error::SizeCap(_) => "SizeCap",
            Error::NonIsometric { .. } => "NonIsometric",
            Error::DegenerateParameters(_) => "DegenerateParameters",
            Error::NegativeEoutTerm { .. } => "NegativeEoutTerm",
            Error::QuadratureUnsupported { .. } => "QuadratureUnsupported",
            Error::SampleBudgetTooSmall { .. } => "SampleBudgetTooSmall",
            Error::AverageNotProduct { .. } => "AverageNotProduct",
            Error::ConsistencyFailure { .. } => "ConsistencyFailure",
            Error::SupportMismatch(_) => "SupportMismatch",
            Error::NotBellDiagonal { .. } => "NotBellDiagonal",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "IoError",
        }
    }

    /// Exit code: 2 input error, 3 numerical consistency failure, 4 budget exhausted.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConsistencyFailure { .. } | Error::NoConvergence { .. } => 3,
            Error::BudgetExhausted { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn member(index: usize, source: Error) -> Error {
        Error::Validation {
            member: Some(index),
            source: Box::new(source),
        }
    }

    /// Wraps an ensemble-level semantic error; already-wrapped errors pass through.
    pub(crate) fn validation(source: Error) -> Error {
        match source {
            e @ Error::Validation { .. } => e,
            e => Error::Validation {
                member: None,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
