use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside the domain of the operation.
    #[error("`{name}` out of domain: {reason}")]
    Domain { name: &'static str, reason: String },

    /// An invalid configuration value; `path` is the dotted field path.
    #[error("configuration error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    /// The spectral grid is too coarse for the narrowband coherence width.
    #[error("grid spacing {spacing:e} exceeds {limit:e} (half the narrowband width)")]
    Resolution { spacing: f64, limit: f64 },

    #[error("density matrices are defined on different grids")]
    GridMismatch,

    #[error("eigendecomposition did not converge")]
    Eigen,

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Domain { .. } | Error::Resolution { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
