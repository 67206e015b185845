use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input outside domain: {0}")]
    Domain(String),
    #[error("unsupported capability: {0}")]
    Capability(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("horizon reached at t = {t}: {what}")]
    Horizon { what: String, t: f64 },
    #[error("integration failed at t = {t}: {what}")]
    Integration { what: String, t: f64 },
    #[error("focal point: characteristic map not monotone at t = {0}")]
    FocalPoint(f64),
    #[error("resolution watchdog: {0}")]
    Resolution(String),
    #[error("snapshot cadence too coarse: {0}")]
    Cadence(String),
    #[error("window wraps the periodic domain: {0}")]
    Periodization(String),
    #[error("vanishing denominator in {0}")]
    Singularity(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Attach the pipeline stage name to an error bubbling out of `harness::run`.
    pub fn in_stage(self, stage: &str) -> Error {
        Error::Config(format!("stage `{stage}`: {self}"))
    }
}
