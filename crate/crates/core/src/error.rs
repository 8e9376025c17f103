use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum SimError {
    /// A caller violated a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numeric routine failed to reach its target accuracy. The achieved
    /// relative tolerance is carried so callers can decide whether to accept.
    #[error("numeric failure: {message} (achieved relative tolerance {achieved:.3e})")]
    Numeric { message: String, achieved: f64 },

    /// The measure has no mass where the operation needs it (e.g. zero total
    /// mass when inverting rates).
    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    /// The measure is outside the supported class for this operation
    /// (e.g. an atom at 1 in a spatial run, or a stays-infinite measure
    /// where a coming-down start is required).
    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),

    /// The coalescent has a single block; no further transition exists.
    #[error("absorbing state: partition has a single block")]
    Absorbing,

    /// A configured resource cap (memory, level count) would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Bad CLI flags or config file contents.
    #[error("config error: {0}")]
    Config(String),

    /// A structural invariant that must hold exactly was violated.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

impl SimError {
    /// Process exit code for the CLI: 2 config, 3 numeric, 4 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Argument(_) => 2,
            SimError::Invariant(_) => 4,
            _ => 3,
        }
    }
}
