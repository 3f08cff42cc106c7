use thiserror::Error;

/// Errors raised by the algebra, simulator, and driver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("qubit count {0} is outside the supported range 1..=64")]
    InvalidQubitCount(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("operator is not hermitian (largest imaginary coefficient {0:e})")]
    NonHermitian(f64),

    #[error("generator `{0}` is neither involutory nor tripotent")]
    Unclassified(String),

    #[error("generator `{label}` is not involutory")]
    NotInvolutory { label: String },

    #[error("register of {n_qubits} qubits exceeds the limit of {limit}")]
    RegisterTooLarge { n_qubits: usize, limit: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid count: {0}")]
    InvalidCount(String),

    #[error("measurement plan does not cover `{0}`")]
    PlanCoverage(String),

    #[error("pool has {size} generators but {needed} are required")]
    PoolTooSmall { size: usize, needed: usize },

    #[error("unknown generator id {0}")]
    UnknownGenerator(usize),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid stop rule: at least one criterion must be set")]
    EmptyStopRule,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
