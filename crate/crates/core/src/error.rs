use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("direction {direction} out of range for dimension {dim}")]
    Direction { direction: usize, dim: usize },

    #[error("ball of radius {radius} does not fit a torus of side {side}")]
    BallTooLarge { radius: usize, side: usize },

    #[error("step count {0} does not fit the 32-bit time index")]
    TimeOverflow(u64),

    #[error("query time {query} exceeds the simulated horizon {horizon}")]
    TimeBeyondHorizon { query: u64, horizon: u64 },

    #[error("inner box is not contained in the outer box")]
    BoxNesting,

    #[error("window of {needed} cells does not fit a line of {side} cells")]
    WindowTooLarge { needed: usize, side: usize },

    #[error("dimension {0} is recurrent (needs at least 3)")]
    Recurrent(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("point set is not contained in a single coordinate plane")]
    NotPlanar,

    #[error("local function is not monotone decreasing: {0}")]
    NotMonotone(String),

    #[error("not a nearest-neighbour path: {0}")]
    NotAPath(String),

    #[error("distribution is not normalized (total mass {0})")]
    Unnormalized(f64),

    #[error("histograms have mismatched atoms")]
    AtomMismatch,

    #[error("grid file format: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
