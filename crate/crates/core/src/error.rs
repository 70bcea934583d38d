use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("walk is not transient: alpha = {alpha} must lie in (0, {dim})")]
    NotTransient { alpha: f64, dim: usize },

    /// The Green matrix could not be factored.
    #[error("ill-conditioned Green matrix (condition estimate {condition:.3e})")]
    Conditioning { condition: f64 },

    /// A computed equilibrium weight came out negative beyond noise.
    #[error("negative equilibrium weight {weight:.3e} at point {point:?}")]
    NegativeWeight { weight: f64, point: [i64; 2] },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("cannot parse {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(what: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::NotTransient { .. } | Error::Parse { .. } => 2,
            Error::Conditioning { .. }
            | Error::NegativeWeight { .. }
            | Error::Resource(_)
            | Error::Internal(_) => 3,
        }
    }
}
