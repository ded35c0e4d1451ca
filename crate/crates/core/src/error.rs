use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument: non-positive factor, empty vector, bad length.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Gram matrix of the exponent table is singular.
    #[error("degenerate exponent structure: rank {rank} < {factors} factors")]
    DegenerateExponents { rank: usize, factors: usize },

    #[error("unsolvable combination {subset:?}: |det| = {determinant:e}")]
    UnsolvableCombination { subset: Vec<usize>, determinant: f64 },

    #[error("enumeration refused: {count} combinations exceed the cap of {cap}")]
    CombinationCap { count: u128, cap: u128 },

    #[error("size error: {0}")]
    Size(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("non-finite value at step {step} (t = {time:e}): {detail}")]
    NonFinite {
        step: usize,
        time: f64,
        detail: String,
        state: Vec<f64>,
    },

    /// A distribution reached the upper end of the volume grid.
    #[error("distribution {phase} reached the grid end at step {step} (t = {time:e}): tail/max = {ratio:e}")]
    Truncation {
        phase: String,
        step: usize,
        time: f64,
        ratio: f64,
    },

    #[error("state corruption: {0}")]
    StateCorruption(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
