use thiserror::Error;

/// Invalid inputs detected before a run starts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("population size must be at least 4, got {0}")]
    PopulationTooSmall(usize),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("bounds must have at least one dimension")]
    EmptyBounds,
    #[error("bounds length mismatch: lower has {lower}, upper has {upper}")]
    BoundsLength { lower: usize, upper: usize },
    #[error("invalid bounds in dimension {dim}: lower {lower} must be below upper {upper}")]
    InvertedBounds { dim: usize, lower: f64, upper: f64 },
    #[error("unknown algorithm `{name}`; valid names: {valid}")]
    UnknownAlgorithm { name: String, valid: String },
    #[error("unknown problem `{name}`; valid identifiers: {valid}")]
    UnknownProblem { name: String, valid: String },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Failures raised while a run is in progress.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("objective returned non-finite value {value} at position {position:?}")]
    NonFiniteObjective { value: f64, position: Vec<f64> },
}
