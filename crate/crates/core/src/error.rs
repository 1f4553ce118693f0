use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid positioning error model: {0}")]
    InvalidModel(&'static str),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("half-plane normal vector is zero")]
    DegenerateNormal,

    #[error("direction to the origin is undefined")]
    UndefinedDirection,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("k-factor undefined: boresight power does not exceed the threshold")]
    WrongRegime,

    #[error("k-factor undefined: main-lobe threshold angle {threshold} reaches past pi/2")]
    BeamWraparound { threshold: f64 },

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { estimate: f64, tol: f64 },
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: "must be finite and > 0",
        })
    }
}
