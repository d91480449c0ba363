use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `g² = Δ² + γ²` violated beyond tolerance.
    #[error("parameters are off the pseudo-Hermitian manifold (|g² - Δ² - γ²| = {residual:e}, tolerance {tolerance:e})")]
    OffManifold { residual: f64, tolerance: f64 },

    #[error("scattering pole at Ω = {omega} rad/µs (|m + i n| = {magnitude:e})")]
    Pole { omega: f64, magnitude: f64 },

    #[error("lost track of the central eigenvalue branch at Δ_B = {delta_b} rad/µs (nearest root {distance} rad/µs away, trust radius {radius})")]
    BranchLost {
        delta_b: f64,
        distance: f64,
        radius: f64,
    },

    #[error("first-order shift relation is singular at Ω' = {omega_prime} rad/µs")]
    SingularRelation { omega_prime: f64 },

    #[error("degenerate trace: {0}")]
    DegenerateTrace(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("not enough points for a fit: need {needed}, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("lookup table: {0}")]
    Table(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (poles, branch loss, singular
    /// relations) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. } | Error::BranchLost { .. } | Error::SingularRelation { .. }
        )
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative",
        });
    }
    Ok(())
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        });
    }
    Ok(())
}
