use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("non-finite integrand value at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("non-finite integrand value at k = ({}, {}, {})", k[0], k[1], k[2])]
    NonFiniteIntegrand3d { k: [f64; 3] },

    #[error("integral did not converge: error estimate {error_estimate:e} after {subdivisions} subdivisions")]
    NotConverged { error_estimate: f64, subdivisions: usize },

    #[error("non-finite field sample at node {index}")]
    NonFiniteSample { index: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid with {n} points per axis exceeds the direct-sum limit of {max}")]
    GridTooLarge { n: usize, max: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
