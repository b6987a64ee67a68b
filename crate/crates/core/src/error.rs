//! Error type shared by every module of the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),

    #[error("non-finite data: {0}")]
    NonFinite(String),

    #[error("symbol: {0}")]
    Symbol(String),

    #[error("aliasing: energy shell outside resolved frequency window: {0}")]
    Aliasing(String),

    #[error("under-resolved phase: {0}")]
    UnderResolved(String),

    #[error("graph condition violated: {0}")]
    GraphCondition(String),

    #[error("covering: {0}")]
    Covering(String),

    #[error("unknown density `{0}`")]
    UnknownDensity(String),

    #[error("flow: {0}")]
    Flow(String),

    #[error("xi left the sampled window: {0}")]
    WindowEscape(String),

    #[error("integration step too coarse: {0}")]
    StepTooCoarse(String),

    #[error("operator is not hermitian: {0}")]
    NotHermitian(String),

    #[error("splitting indeterminate: {0}")]
    Indeterminate(String),

    #[error("decomposition: {0}")]
    Decomposition(String),

    #[error("caustic detected at x = {location}")]
    Caustic { location: f64 },

    #[error("feasibility violated: {0}")]
    Feasibility(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error("config: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tag an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
