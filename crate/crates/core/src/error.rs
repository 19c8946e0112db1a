use thiserror::Error;

/// Errors raised by graph construction, coloring, model evaluation, sampling
/// and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown lattice neighborhood kind `{0}` (expected two, four or eight)")]
    InvalidLatticeKind(String),

    #[error("invalid conclique cover: {0}")]
    InvalidCover(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The model family cannot be used on the supplied graph, e.g. an
    /// anisotropic lattice model on a graph without lattice coordinates.
    #[error("model/topology mismatch: {0}")]
    Incompatible(String),

    #[error("missing value at site {0}")]
    MissingValue(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
