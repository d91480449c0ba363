//! Physical parameters of the three-mode system.
//!
//! All rates and detunings are angular frequencies in rad/µs.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};
use crate::units::mhz_to_rad;

/// Numerical tolerances shared by the predicates in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance for algebraic identities (manifold membership,
    /// conjugation closure, root residuals).
    pub algebraic: f64,
    /// Eigenvector coalescence tolerance near an exceptional point.
    pub coalescence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-9,
            coalescence: 1e-4,
        }
    }
}

/// Full parameter set of the cavity plus two magnon modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Port-1 coupling rate of the cavity.
    pub kappa1: f64,
    /// Port-2 coupling rate of the cavity.
    pub kappa2: f64,
    /// Intrinsic cavity loss.
    pub kappa_int: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub g1: f64,
    pub g2: f64,
    /// Magnon-cavity detuning ω₁ − ω_c.
    pub delta1: f64,
    /// Magnon-cavity detuning ω₂ − ω_c.
    pub delta2: f64,
    /// Cavity frequency, only used to label absolute frequencies.
    pub omega_c: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("kappa1", self.kappa1)?;
        ensure_non_negative("kappa2", self.kappa2)?;
        ensure_non_negative("kappa_int", self.kappa_int)?;
        ensure_non_negative("gamma1", self.gamma1)?;
        ensure_non_negative("gamma2", self.gamma2)?;
        ensure_non_negative("g1", self.g1)?;
        ensure_non_negative("g2", self.g2)?;
        ensure_finite("delta1", self.delta1)?;
        ensure_finite("delta2", self.delta2)?;
        ensure_finite("omega_c", self.omega_c)?;
        Ok(())
    }

    /// Effective cavity gain under coherent perfect absorption,
    /// κ_c = κ₁ + κ₂ − κ_int.
    #[inline]
    pub fn kappa_c(&self) -> f64 {
        self.kappa1 + self.kappa2 - self.kappa_int
    }

    /// Total cavity loss seen by the Langevin equation without drive
    /// matching, κ₁ + κ₂ + κ_int.
    #[inline]
    pub fn kappa_total(&self) -> f64 {
        self.kappa1 + self.kappa2 + self.kappa_int
    }

    /// Lifts a symmetric parameter set to the full description, choosing the
    /// intrinsic loss so that κ_c = 2γ.
    pub fn from_symmetric(sym: &SymmetricParams, kappa1: f64, kappa2: f64) -> Result<Self> {
        ensure_non_negative("kappa1", kappa1)?;
        ensure_non_negative("kappa2", kappa2)?;
        let kappa_int = kappa1 + kappa2 - 2.0 * sym.gamma;
        // Allow rounding noise when the port rates exactly balance the gain.
        let noise = 4.0 * f64::EPSILON * (kappa1 + kappa2 + 2.0 * sym.gamma);
        if kappa_int < -noise {
            return Err(Error::InvalidParameter {
                name: "kappa_int",
                value: kappa_int,
                reason: "κ₁ + κ₂ must be at least 2γ so that κ_int = κ₁ + κ₂ − 2γ is non-negative",
            });
        }
        Ok(Self {
            kappa1,
            kappa2,
            kappa_int: kappa_int.max(0.0),
            gamma1: sym.gamma,
            gamma2: sym.gamma,
            g1: sym.g,
            g2: sym.g,
            delta1: sym.delta,
            delta2: -sym.delta,
            omega_c: 0.0,
        })
    }

    /// The same system with both magnon frequencies shifted by `delta_b`.
    pub fn with_magnon_shift(&self, delta_b: f64) -> Self {
        Self {
            delta1: self.delta1 + delta_b,
            delta2: self.delta2 + delta_b,
            ..*self
        }
    }

    /// Symmetric-case predicate: γ₁ = γ₂, g₁ = g₂, Δ₁ = −Δ₂ and κ_c = 2γ₁,
    /// each to relative tolerance `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        close(self.gamma1, self.gamma2)
            && close(self.g1, self.g2)
            && close(self.delta1, -self.delta2)
            && close(self.kappa_c(), 2.0 * self.gamma1)
    }

    /// Projects onto the symmetric description, if the symmetric predicate
    /// holds.
    pub fn symmetric(&self, tol: f64) -> Option<SymmetricParams> {
        self.is_symmetric(tol).then_some(SymmetricParams {
            gamma: self.gamma1,
            g: self.g1,
            delta: self.delta1,
        })
    }
}

/// The symmetric three-mode case: identical spheres, equal couplings,
/// opposite detunings and κ_c = 2γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricParams {
    pub gamma: f64,
    pub g: f64,
    /// Half splitting: Δ₁ = −Δ₂ = Δ.
    pub delta: f64,
}

impl SymmetricParams {
    pub fn new(gamma: f64, g: f64, delta: f64) -> Result<Self> {
        ensure_non_negative("gamma", gamma)?;
        ensure_non_negative("g", g)?;
        ensure_finite("delta", delta)?;
        Ok(Self { gamma, g, delta })
    }

    pub fn from_mhz(gamma_mhz: f64, g_mhz: f64, delta_mhz: f64) -> Result<Self> {
        Self::new(mhz_to_rad(gamma_mhz), mhz_to_rad(g_mhz), mhz_to_rad(delta_mhz))
    }

    /// Point on the pseudo-Hermitian manifold with Δ = √(g² − γ²) ≥ 0.
    pub fn on_manifold(gamma: f64, g: f64) -> Result<Self> {
        ensure_non_negative("gamma", gamma)?;
        ensure_non_negative("g", g)?;
        if g < gamma {
            return Err(Error::InvalidParameter {
                name: "g",
                value: g,
                reason: "the manifold g² = Δ² + γ² needs g ≥ γ for a real detuning",
            });
        }
        Ok(Self {
            gamma,
            g,
            delta: ((g - gamma) * (g + gamma)).sqrt(),
        })
    }

    /// g² − Δ² − γ².
    #[inline]
    pub fn manifold_residual(&self) -> f64 {
        self.g * self.g - self.delta * self.delta - self.gamma * self.gamma
    }

    pub fn is_on_manifold(&self, tol: f64) -> bool {
        let scale = (self.g * self.g).max(self.delta * self.delta + self.gamma * self.gamma);
        self.manifold_residual().abs() <= tol * scale.max(f64::MIN_POSITIVE)
    }

    pub(crate) fn require_manifold(&self, tol: f64) -> Result<()> {
        if self.is_on_manifold(tol) {
            Ok(())
        } else {
            Err(Error::OffManifold {
                residual: self.manifold_residual().abs(),
                tolerance: tol,
            })
        }
    }

    /// The symmetric system sitting exactly at its third-order exceptional
    /// point for damping `gamma`.
    pub fn ep3(gamma: f64) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        let p = crate::eigen::locate_ep3(gamma)?;
        Ok(Self {
            gamma,
            g: p.g_ep3,
            delta: p.delta_ep3,
        })
    }
}

/// Device values used throughout: γ/2π = 3 MHz spheres and ports with
/// (κ_j + κ_int)/2π = 6 MHz, κ_int/2π = 2 MHz.
pub mod defaults {
    pub const GAMMA_MHZ: f64 = 3.0;
    pub const KAPPA1_MHZ: f64 = 4.0;
    pub const KAPPA2_MHZ: f64 = 4.0;
    pub const KAPPA_INT_MHZ: f64 = 2.0;
    /// Coupling used for the away-from-EP3 comparison.
    pub const G_AWAY_MHZ: f64 = 4.59;
    /// Perturbation applied in the sensitivity chain.
    pub const DELTA_B_MHZ: f64 = 0.025;
    /// Gyromagnetic ratio γ_e/2π of YIG.
    pub const GYRO_GHZ_PER_T: f64 = 28.0;
    /// Smallest resolvable spectrum change of the network analyser.
    pub const DELTA_A_DB: f64 = 1e-13;
    /// Measured depth of the unperturbed CPA dip.
    pub const EXPERIMENTAL_FLOOR_DB: f64 = -91.5;
    /// Clamp used when the model floor is wanted instead.
    pub const MODEL_FLOOR_DB: f64 = -120.0;
}
