use thiserror::Error;

/// Which evaluable curve vanished (or was otherwise unusable) at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Survival,
    Cdf,
    Density,
    Denominator,
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Curve::Survival => "survival",
            Curve::Cdf => "cdf",
            Curve::Density => "density",
            Curve::Denominator => "rational-function denominator",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {curve} vanishes at t = {t}")]
    Vanishing { curve: Curve, t: f64 },

    #[error("domain error at t = {t}: {reason}")]
    Domain { t: f64, reason: String },

    #[error("quadrature did not converge on [{a}, {b}] (estimate {estimate})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("index out of range: i = {i}, n = {n}")]
    IndexOutOfRange { i: usize, n: usize },

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Attach the offending grid point to an error raised while sweeping a curve.
    pub(crate) fn at(self, t: f64) -> Error {
        match self {
            e @ (Error::Vanishing { .. } | Error::Domain { .. }) => e,
            other => Error::Domain {
                t,
                reason: other.to_string(),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
