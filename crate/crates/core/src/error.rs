use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unsupported distribution: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("enumeration space has {outcomes} outcomes, limit is {limit}")]
    EnumerationTooLarge { outcomes: f64, limit: u64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be finite, got {x}"))
    }
}
