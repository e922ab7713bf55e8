use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("kinetic expectation must be non-negative, got {0}")]
    NegativeKinetic(f64),

    #[error("gamma must be >= 1, got {0}")]
    GammaBelowOne(f64),

    #[error("wavefunction has zero norm")]
    ZeroNorm,

    #[error("wavefunction norm deviates from 1 by {deviation:.3e}; normalize first")]
    NotNormalized { deviation: f64 },

    #[error("radial grid needs at least {min} interior points, got {actual}")]
    TooFewGridPoints { min: usize, actual: usize },

    #[error("grid too coarse: ground-state candidate has {sign_changes} interior sign changes")]
    GridTooCoarse { sign_changes: usize },

    #[error("eigensolver residual {residual:.3e} exceeds bound {bound:.3e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("no interior minimum in bracket [{lo:.6e}, {hi:.6e}]; widen the bracket")]
    BracketWithoutMinimum { lo: f64, hi: f64 },

    #[error("scale collapse: {detail}")]
    ScaleCollapse { detail: String },

    #[error("{0}")]
    Unconverged(String),
}

pub type Result<T> = core::result::Result<T, Error>;

/// Rejects zero, negatives, NaN, and infinities in one place.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}
