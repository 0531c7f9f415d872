use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("nonlinear term produced a nonzero mean (zero-frequency) component: {0}")]
    ZeroMean(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("construction degeneracy at stage {stage}: {detail}")]
    Degenerate { stage: usize, detail: String },

    #[error("evolution diverged at t = {t}: {detail}")]
    Divergence { t: f64, detail: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
