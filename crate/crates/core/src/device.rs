//! Laboratory controls mapped onto model parameters: bias field to magnon
//! frequency, sphere position to coupling strength, crystal rotation to
//! anisotropy shift.
//!
//! All values here are ordinary frequencies in MHz, fields in tesla and
//! lengths in mm.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Error, Result};
use crate::units::ghz_per_tesla_to_mhz_per_tesla;

/// Kittel-mode tuning by a static bias field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnonTuning {
    /// γ_e/2π, GHz/T.
    pub gamma_e: f64,
    /// Field-independent offset ν_{m,0}, MHz.
    pub omega_m0: f64,
}

impl Default for MagnonTuning {
    fn default() -> Self {
        Self {
            gamma_e: crate::params::defaults::GYRO_GHZ_PER_T,
            omega_m0: 0.0,
        }
    }
}

impl MagnonTuning {
    pub fn new(gamma_e: f64, omega_m0: f64) -> Result<Self> {
        ensure_positive("gamma_e", gamma_e)?;
        ensure_finite("omega_m0", omega_m0)?;
        Ok(Self { gamma_e, omega_m0 })
    }

    /// Field slope in MHz per tesla.
    pub fn slope_mhz_per_tesla(&self) -> f64 {
        ghz_per_tesla_to_mhz_per_tesla(self.gamma_e)
    }

    /// Bias field that puts the Kittel mode at `freq_mhz`.
    pub fn field_for_frequency(&self, freq_mhz: f64) -> Result<f64> {
        ensure_finite("frequency", freq_mhz)?;
        let b = (freq_mhz - self.omega_m0) / self.slope_mhz_per_tesla();
        ensure_non_negative("b_field", b)?;
        Ok(b)
    }
}

/// ν_m = (γ_e/2π)·B + ν_{m,0}, MHz.
pub fn magnon_frequency(tuning: &MagnonTuning, b_field: f64) -> Result<f64> {
    ensure_non_negative("b_field", b_field)?;
    Ok(tuning.slope_mhz_per_tesla() * b_field + tuning.omega_m0)
}

/// Sphere coupling set by its position in the TE₁₀₂ field profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionCoupling {
    /// MHz.
    pub g_max: f64,
    /// mm.
    pub cavity_length_l: f64,
}

impl Default for PositionCoupling {
    fn default() -> Self {
        Self {
            g_max: 12.0,
            cavity_length_l: 50.0,
        }
    }
}

impl PositionCoupling {
    pub fn new(g_max: f64, cavity_length_l: f64) -> Result<Self> {
        ensure_non_negative("g_max", g_max)?;
        ensure_positive("cavity_length_l", cavity_length_l)?;
        Ok(Self { g_max, cavity_length_l })
    }
}

/// g(y) = g_max·|sin(2πy/L)| for |y| ≤ L/4, with y = 0 at the field node.
pub fn coupling_vs_position(pc: &PositionCoupling, y_mm: f64) -> Result<f64> {
    ensure_finite("y", y_mm)?;
    let l = pc.cavity_length_l;
    if y_mm.abs() > l / 4.0 {
        return Err(Error::InvalidParameter {
            name: "y",
            value: y_mm,
            reason: "sphere position must satisfy |y| ≤ L/4",
        });
    }
    Ok(pc.g_max * (std::f64::consts::TAU * y_mm / l).sin().abs())
}

/// Default peak-to-peak range of the rotation model, MHz.
pub const ROTATION_SPAN_MHZ: f64 = 300.0;

/// ν(θ) = mean + (span/2)·cos 2θ, θ in degrees.
pub fn anisotropy_rotation(theta_deg: f64, span_mhz: f64, mean_mhz: f64) -> f64 {
    mean_mhz + 0.5 * span_mhz * (2.0 * theta_deg.to_radians()).cos()
}

#[derive(Debug, Deserialize)]
struct RotationRow {
    theta_deg: f64,
    freq_mhz: f64,
}

/// Measured rotation curve, interpolated linearly between knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationTable {
    knots: Vec<(f64, f64)>,
}

impl RotationTable {
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Table(format!("need at least two knots, found {}", knots.len())));
        }
        for &(t, f) in &knots {
            if !t.is_finite() || !f.is_finite() {
                return Err(Error::Table(format!("non-finite knot ({t}, {f})")));
            }
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = knots.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Table(format!("duplicate knot at θ = {}°", w[0].0)));
        }
        Ok(Self { knots })
    }

    /// Reads a `theta_deg,freq_mhz` CSV.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["theta_deg", "freq_mhz"] {
            return Err(Error::Table(format!(
                "expected header `theta_deg,freq_mhz`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let knots = rdr
            .deserialize::<RotationRow>()
            .map(|row| row.map(|r| (r.theta_deg, r.freq_mhz)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(knots)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Frequency at `theta_deg`, wrapped into [0, 360).
    pub fn frequency(&self, theta_deg: f64) -> Result<f64> {
        ensure_finite("theta", theta_deg)?;
        let theta = theta_deg.rem_euclid(360.0);
        let (first, last) = (self.knots[0], self.knots[self.knots.len() - 1]);
        if theta < first.0 || theta > last.0 {
            return Err(Error::Table(format!(
                "θ = {theta}° lies outside the table span [{}, {}]°",
                first.0, last.0
            )));
        }
        let i = self.knots.partition_point(|k| k.0 <= theta);
        if i == self.knots.len() {
            return Ok(last.1);
        }
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        let t = (theta - a.0) / (b.0 - a.0);
        Ok(a.1 + t * (b.1 - a.1))
    }
}

/// Rotation tuning: the analytic cos 2θ placeholder or a lookup table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RotationModel {
    Analytic { span_mhz: f64, mean_mhz: f64 },
    Table(RotationTable),
}

impl RotationModel {
    pub fn frequency(&self, theta_deg: f64) -> Result<f64> {
        match self {
            RotationModel::Analytic { span_mhz, mean_mhz } => {
                ensure_finite("theta", theta_deg)?;
                Ok(anisotropy_rotation(theta_deg, *span_mhz, *mean_mhz))
            }
            RotationModel::Table(t) => t.frequency(theta_deg),
        }
    }
}
