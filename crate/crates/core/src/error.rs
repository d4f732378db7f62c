use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("point outside the domain of {chart}: {reason}")]
    Domain { chart: String, reason: String },
    #[error("image of the transform left the domain of {chart}: {reason}")]
    ImageDomain { chart: String, reason: String },
    #[error("form degree {0} exceeds dimension {1}")]
    Degree(usize, usize),
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("metric is singular (condition number {0:.3e})")]
    SingularMetric(f64),
    #[error("transform Jacobian is singular")]
    SingularJacobian,
    #[error("trajectory left the chart at t = {t}")]
    DomainExit { t: f64 },
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("dimension {0} is not supported here")]
    UnsupportedN(usize),
    #[error("{0}")]
    Parse(String),
}

impl GeoError {
    pub fn domain(chart: &str, reason: impl Into<String>) -> Self {
        GeoError::Domain { chart: chart.to_string(), reason: reason.into() }
    }

    /// True for errors that the CLI maps to exit code 2.
    pub fn is_domain(&self) -> bool {
        matches!(self, GeoError::Domain { .. } | GeoError::ImageDomain { .. } | GeoError::DomainExit { .. })
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
