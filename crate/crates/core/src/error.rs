use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("outcome index {index} out of range ({count} outcomes)")]
    OutcomeOutOfRange { index: usize, count: usize },

    #[error("zero-probability outcome {index} (p = {probability:e}): post-measurement state undefined")]
    ZeroProbabilityOutcome { index: usize, probability: f64 },

    #[error("{0} requires passive mode")]
    RequiresPassiveMode(&'static str),

    #[error("ensemble required in quantum mode")]
    EnsembleRequired,

    #[error("insufficient shots: {0}")]
    InsufficientShots(String),

    #[error("missing estimates: expected {expected}, found {found}")]
    MissingEstimates { expected: usize, found: usize },

    #[error("outcomes are not dichotomic: found eigenvalue {0}")]
    NonDichotomic(f64),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{context}: {source}")]
    Runtime { context: String, source: Box<Error> },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn in_context(self, context: impl Into<String>) -> Self {
        Error::Runtime {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Validation failures map to exit code 1, everything else to 2.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
