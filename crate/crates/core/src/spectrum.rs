//! Two-port input-output scattering and the total output spectrum.
//!
//! Probe frequencies are offsets Ω = ω − ω_c from the cavity, in rad/µs,
//! except on [`SpectrumTrace`] grids, which are in MHz.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::params::{SymmetricParams, SystemParams};
use crate::units::{mhz_to_rad, to_db_clamped};

type C = Complex64;

/// |m + i n| below this is treated as a scattering pole.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Two-port drive: power ratio p and phase difference φ of the port-1 input
/// relative to port 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub p: f64,
    pub phi: f64,
}

impl DriveParams {
    /// Validates p > 0 and wraps φ into (−π, π].
    pub fn new(p: f64, phi: f64) -> Result<Self> {
        ensure_positive("p", p)?;
        ensure_finite("phi", phi)?;
        let mut wrapped = phi.rem_euclid(TAU);
        if wrapped > PI {
            wrapped -= TAU;
        }
        Ok(Self { p, phi: wrapped })
    }

    /// Port-1 input amplitude √p·e^{−iφ} relative to a unit port-2 input.
    pub fn amplitude(&self) -> C {
        C::from_polar(self.p.sqrt(), -self.phi)
    }
}

/// m(Ω) and n(Ω) for two magnons at independent detunings.
///
/// m = −(κ₁ + κ₂ + κ_int) − Σ g_j²γ_j / ((Ω − Δ_j)² + γ_j²)
/// n = Ω − Σ g_j²(Ω − Δ_j) / ((Ω − Δ_j)² + γ_j²)
pub fn mn_functions(params: &SystemParams, omega: f64) -> Result<(f64, f64)> {
    let mut m = -params.kappa_total();
    let mut n = omega;
    for (g, gamma, delta) in [
        (params.g1, params.gamma1, params.delta1),
        (params.g2, params.gamma2, params.delta2),
    ] {
        let x = omega - delta;
        let denom = x * x + gamma * gamma;
        if denom == 0.0 {
            if g == 0.0 {
                continue;
            }
            return Err(Error::Pole {
                omega,
                magnitude: 0.0,
            });
        }
        let w = g * g / denom;
        m -= w * gamma;
        n -= w * x;
    }
    Ok((m, n))
}

/// The symmetric-case forms of m and n with κ_int eliminated through
/// κ₁ + κ₂ − κ_int = 2γ.
pub fn mn_symmetric(sym: &SymmetricParams, kappa1: f64, kappa2: f64, omega: f64) -> (f64, f64) {
    let SymmetricParams { gamma, g, delta } = *sym;
    let (lo, hi) = (omega - delta, omega + delta);
    let (dlo, dhi) = (lo * lo + gamma * gamma, hi * hi + gamma * gamma);
    let g2 = g * g;
    let m = 2.0 * gamma - 2.0 * kappa1 - 2.0 * kappa2 - g2 * gamma / dlo - g2 * gamma / dhi;
    let n = omega - g2 * lo / dlo - g2 * hi / dhi;
    (m, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCoeffs {
    pub t12: C,
    pub t21: C,
    pub r11: C,
    pub r22: C,
}

/// t₁₂ = t₂₁ = −2√(κ₁κ₂)/(m + in), r_jj = −1 − 2κ_j/(m + in).
pub fn scattering_coeffs(params: &SystemParams, omega: f64) -> Result<ScatteringCoeffs> {
    let (m, n) = mn_functions(params, omega)?;
    let z = C::new(m, n);
    if z.norm() < POLE_THRESHOLD {
        return Err(Error::Pole {
            omega,
            magnitude: z.norm(),
        });
    }
    let t = -2.0 * (params.kappa1 * params.kappa2).sqrt() / z;
    Ok(ScatteringCoeffs {
        t12: t,
        t21: t,
        r11: -1.0 - 2.0 * params.kappa1 / z,
        r22: -1.0 - 2.0 * params.kappa2 / z,
    })
}

/// Output amplitudes (S₁, S₂) for a unit port-2 input and a port-1 input
/// √p·e^{−iφ}.
pub fn output_amplitudes(params: &SystemParams, drive: &DriveParams, omega: f64) -> Result<(C, C)> {
    let s = scattering_coeffs(params, omega)?;
    let u = drive.amplitude();
    Ok((s.r11 * u + s.t12, s.r22 + s.t21 * u))
}

/// |S_tot|² = |S₁|² + |S₂|².
pub fn total_output(params: &SystemParams, drive: &DriveParams, omega: f64) -> Result<f64> {
    let (s1, s2) = output_amplitudes(params, drive, omega)?;
    Ok(s1.norm_sqr() + s2.norm_sqr())
}

/// |S_tot|² from the expanded closed form
///
/// [(p + 1)|B|² + |δ|² + 2 Re(B̄ δ)] / (m² + n²),
///
/// with B = m + in + 2κ₁ + 2√(κ₁κ₂)e^{iφ}/√p and
/// δ = 2(κ₂ − κ₁) + 2√(κ₁κ₂)(√p e^{−iφ} − e^{iφ}/√p). For κ₂ > 0,
/// δ = 2(√p e^{−iφ} − √(κ₁/κ₂))(√(κ₁κ₂) + κ₂e^{iφ}/√p), so the mismatch
/// terms vanish under the CPA drive.
pub fn total_output_expanded(params: &SystemParams, drive: &DriveParams, omega: f64) -> Result<f64> {
    let (m, n) = mn_functions(params, omega)?;
    let denom = m * m + n * n;
    if denom.sqrt() < POLE_THRESHOLD {
        return Err(Error::Pole {
            omega,
            magnitude: denom.sqrt(),
        });
    }
    let s = (params.kappa1 * params.kappa2).sqrt();
    let u = drive.amplitude();
    let inv_u = u.inv();
    let b = C::new(m + 2.0 * params.kappa1, n) + 2.0 * s * inv_u;
    let delta = 2.0 * (params.kappa2 - params.kappa1) + 2.0 * s * (u - inv_u);
    let numerator = (drive.p + 1.0) * b.norm_sqr() + delta.norm_sqr() + 2.0 * (b.conj() * delta).re;
    Ok(numerator / denom)
}

/// The drive that makes both outputs vanish at every real eigenfrequency:
/// √p·e^{−iφ} = √(κ₁/κ₂).
pub fn cpa_drive(params: &SystemParams) -> Result<DriveParams> {
    ensure_positive("kappa2", params.kappa2)?;
    DriveParams::new(params.kappa1 / params.kappa2, 0.0)
}

/// Closed-form CPA spectrum of the pseudo-Hermitian system at one offset:
///
/// (κ₁/κ₂ + 1) · Ω²(Ω² − 3g² + 4γ²)² / [((Ω² − g²)² + 4Ω²γ²)(m² + n²)].
pub fn cpa_spectrum_point(sym: &SymmetricParams, kappa1: f64, kappa2: f64, omega: f64) -> Result<f64> {
    let SymmetricParams { gamma, g, .. } = *sym;
    let (m, n) = mn_symmetric(sym, kappa1, kappa2, omega);
    let w2 = omega * omega;
    let spread = w2 - 3.0 * g * g + 4.0 * gamma * gamma;
    let resonance = (w2 - g * g).powi(2) + 4.0 * w2 * gamma * gamma;
    if resonance == 0.0 {
        return Err(Error::Pole {
            omega,
            magnitude: 0.0,
        });
    }
    Ok((kappa1 / kappa2 + 1.0) * w2 * spread * spread / resonance / (m * m + n * n))
}

/// Sampled total output spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    /// Probe offsets Ω/2π in MHz, strictly increasing.
    pub grid: Vec<f64>,
    /// |S_tot|², linear. Pole points hold +∞.
    pub values: Vec<f64>,
    /// 10·log₁₀ of `values`, clamped at `floor_db`.
    pub values_db: Vec<f64>,
    pub floor_db: f64,
    /// Indices of grid points where |m + in| fell below [`POLE_THRESHOLD`].
    pub poles: Vec<usize>,
}

impl SpectrumTrace {
    fn from_fn(grid: &[f64], floor_db: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        validate_grid(grid)?;
        ensure_finite("floor_db", floor_db)?;
        let mut values = Vec::with_capacity(grid.len());
        let mut poles = Vec::new();
        for (i, &nu) in grid.iter().enumerate() {
            match f(mhz_to_rad(nu)) {
                Ok(v) => values.push(v),
                Err(Error::Pole { .. }) => {
                    poles.push(i);
                    values.push(f64::INFINITY);
                }
                Err(e) => return Err(e),
            }
        }
        let values_db = values.iter().map(|&v| to_db_clamped(v, floor_db)).collect();
        Ok(Self {
            grid: grid.to_vec(),
            values,
            values_db,
            floor_db,
            poles,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Writes `omega_mhz,s_tot_linear,s_tot_db` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["omega_mhz", "s_tot_linear", "s_tot_db"])?;
        for i in 0..self.len() {
            w.write_record([
                format!("{:.6}", self.grid[i]),
                format!("{:.10e}", self.values[i]),
                format!("{:.6}", self.values_db[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing"));
    }
    Ok(())
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = (points - 1) as f64;
            (0..points)
                .map(|i| start + (stop - start) * (i as f64 / last))
                .collect()
        }
    }
}

/// 2001 points spanning ±10 MHz.
pub fn default_grid() -> Vec<f64> {
    linear_grid(-10.0, 10.0, 2001)
}

/// |S_tot|² on a grid of offsets in MHz.
pub fn total_output_spectrum(
    params: &SystemParams,
    drive: &DriveParams,
    grid: &[f64],
    floor_db: f64,
) -> Result<SpectrumTrace> {
    SpectrumTrace::from_fn(grid, floor_db, |omega| total_output(params, drive, omega))
}

/// Closed-form CPA spectrum on a grid of offsets in MHz. Requires manifold
/// parameters; κ_int is implied by κ₁ + κ₂ − κ_int = 2γ.
pub fn cpa_spectrum_closed_form(
    sym: &SymmetricParams,
    kappa1: f64,
    kappa2: f64,
    grid: &[f64],
    floor_db: f64,
) -> Result<SpectrumTrace> {
    sym.require_manifold(crate::params::Tolerances::default().algebraic)?;
    ensure_positive("kappa2", kappa2)?;
    SystemParams::from_symmetric(sym, kappa1, kappa2)?;
    SpectrumTrace::from_fn(grid, floor_db, |omega| cpa_spectrum_point(sym, kappa1, kappa2, omega))
}

/// Location and depth of the deepest spectral dip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipReport {
    /// MHz.
    pub dip_location: f64,
    /// Linear |S_tot|² at the refined location.
    pub dip_value: f64,
    pub dip_value_db: f64,
    /// Width of the final golden-section bracket, MHz.
    pub refinement_width: f64,
}

/// Golden-section bracket width at which [`find_dip`] stops, MHz.
pub const DIP_REFINEMENT_WIDTH: f64 = 1e-6;

/// Finds the global minimum of `trace` on its grid and refines it by
/// golden-section search of `refine` (offset in MHz → linear |S_tot|²)
/// between the neighbouring grid points.
pub fn find_dip(trace: &SpectrumTrace, refine: impl Fn(f64) -> f64) -> Result<DipReport> {
    let n = trace.len();
    if n < 3 {
        return Err(Error::DegenerateTrace("need at least three points"));
    }
    let (imin, &vmin) = trace
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty trace");
    let vmax = trace
        .values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !(vmax > vmin) {
        return Err(Error::DegenerateTrace("trace has no strict minimum"));
    }

    let f = |x: f64| {
        let v = refine(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut lo = trace.grid[imin.saturating_sub(1)];
    let mut hi = trace.grid[(imin + 1).min(n - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > DIP_REFINEMENT_WIDTH {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fmid = f(mid);
    let (location, value) = if fmid <= vmin {
        (mid, fmid)
    } else {
        (trace.grid[imin], vmin)
    };
    Ok(DipReport {
        dip_location: location,
        dip_value: value,
        dip_value_db: to_db_clamped(value, trace.floor_db),
        refinement_width: hi - lo,
    })
}
