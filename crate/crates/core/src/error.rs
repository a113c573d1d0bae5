use alloc::string::String;

/// Errors raised by samplers, numerical routines and statistical tests.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge on [{lo}, {hi}]")]
    Quadrature { lo: f64, hi: f64 },

    #[error("inversion did not converge for level {0}")]
    Inversion(f64),

    #[error("iteration cap of {0} exceeded")]
    IterationCap(u64),

    #[error("value leaves the representable range")]
    Overflow,

    #[error("negative epsilon value {value} at log-abscissa {at}")]
    NegativeEpsilon { value: f64, at: f64 },

    #[error("cdf returned {0}, outside [0, 1]")]
    InvalidCdf(f64),

    #[error("sample too small: {got} < {need}")]
    SampleTooSmall { got: usize, need: usize },

    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
