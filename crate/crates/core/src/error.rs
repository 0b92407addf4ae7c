use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("not in Sobolev domain: {0}")]
    NotInSobolevDomain(String),
    #[error("CFL violation: dt = {dt} exceeds h = {h}")]
    Cfl { dt: f64, h: f64 },
    #[error("solution blew up at t={0}")]
    BlowUp(f64),
    #[error("requires nonnegative integrand")]
    NegativeIntegrand,
    #[error("profile must be radially nonincreasing")]
    NonMonotoneProfile,
    #[error("overlapping bump supports: {0}")]
    OverlappingSupports(String),
    #[error("unknown flavor: {0}")]
    UnknownFlavor(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
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
    /// Errors that come from bad user input rather than from the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidParameter(_) | Error::UnknownFlavor(_) | Error::Csv(_) | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
