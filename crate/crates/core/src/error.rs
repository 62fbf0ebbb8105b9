use crate::parse::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid hint: {0}")]
    InvalidHint(String),

    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),

    #[error("invalid integration bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },

    /// The panel budget ran out before two refinement levels agreed. The
    /// last computed value and its error estimate ride along so callers can
    /// still report partial information.
    #[error(
        "quadrature did not converge within {panels} panels \
         (last value {value:e}, error estimate {estimate:e})"
    )]
    NonConvergent {
        value: f64,
        estimate: f64,
        panels: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The integration-by-parts split of the weighted tail integral places
    /// its interior cut at 1, so it needs `eta < 1 < l`.
    #[error("tail decomposition needs eta < 1 < l, got eta = {eta}, l = {l}")]
    TailSplitDomain { eta: f64, l: f64 },

    #[error("operation needs a period hint, but none was declared")]
    MissingPeriodHint,

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
