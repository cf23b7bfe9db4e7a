use thiserror::Error;

#[derive(Debug, Error)]
pub enum CapflowError {
    /// Input outside the mathematical domain of a routine (index range, cone, denominator).
    #[error("domain error: {0}")]
    Domain(String),

    /// Point too close to the pole `e` of the Möbius map.
    #[error("point within {distance:e} of the pole e")]
    Pole { distance: f64 },

    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("convexity lost at t = {t}: {detail}")]
    ConvexityLoss { t: f64, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Value outside a tabulated range (cap tables).
    #[error("out of table range: {0}")]
    Range(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CapflowError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(CapflowError::Domain(msg.into()))
}
