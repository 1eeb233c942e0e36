use thiserror::Error;

pub type Result<T> = std::result::Result<T, BeamError>;

/// Errors raised by the numerical solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("invalid {field}: {value} ({constraint})")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("{field} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid load: {0}")]
    InvalidLoad(String),

    #[error("stiffness operator is rank deficient: {0}")]
    RankDeficient(String),

    #[error("factorization failed at pivot {pivot} (value {value:e})")]
    Factorization { pivot: usize, value: f64 },

    #[error("found only {found} of {requested} characteristic roots below beta*L = {limit}")]
    InsufficientRoots {
        found: usize,
        requested: usize,
        limit: f64,
    },

    #[error("mode at beta = {beta} is degenerate (singular value gap {gap:e})")]
    DegenerateMode { beta: f64, gap: f64 },

    #[error("non-finite force at t = {t}")]
    NonFiniteForce { t: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no steady state at f = {f_hz} Hz: amplitude grew by a factor {growth:.4} over the measurement window")]
    NonConvergence { f_hz: f64, growth: f64 },

    #[error("secant iteration did not converge in {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },
}

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(BeamError::InvalidParameter {
            field,
            value,
            constraint: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(BeamError::InvalidParameter {
            field,
            value,
            constraint: "must be finite and >= 0",
        })
    }
}

pub(crate) fn within(field: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(BeamError::OutOfDomain {
            field,
            value,
            lo,
            hi,
        })
    }
}
