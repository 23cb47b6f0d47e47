use thiserror::Error;

/// Errors raised by the special functions, the channel statistics and the
/// Monte-Carlo pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument outside the supported domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: no convergence after {terms_used} terms (estimate {estimate:e}, error {est_error:e})")]
    NoConvergence {
        function: &'static str,
        terms_used: usize,
        estimate: f64,
        est_error: f64,
    },

    #[error("quadrature did not reach tolerance (estimate {estimate:e}, error {abs_err:e})")]
    Quadrature { estimate: f64, abs_err: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{quantity} evaluated to {value:e}, outside [0, 1] beyond tolerance")]
    OutOfRange { quantity: &'static str, value: f64 },

    #[error("need at least {required} samples, got {got}")]
    InsufficientSamples { required: usize, got: usize },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
