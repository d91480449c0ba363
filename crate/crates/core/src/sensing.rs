//! Perturbation response of the central eigenvalue and the sensitivity
//! factors built on it.
//!
//! A bias-field change shifts both Kittel modes by the same Δ_B. At the EP3
//! the central eigenvalue moves as Δ_B^{1/3}; elsewhere on the manifold it
//! moves linearly. The CPA dip converts that shift into a change of the
//! spectral minimum, and the two enhancements multiply.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::{cubic_coeffs, monic_cubic_roots, ComplexTriple};
use crate::eigen::{manifold_splitting, Matrix3};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::params::{SymmetricParams, SystemParams, Tolerances};
use crate::spectrum::{cpa_drive, find_dip, total_output, total_output_spectrum, DipReport, DriveParams};
use crate::units::{ghz_per_tesla_to_mhz_per_tesla, mhz_to_rad, rad_to_mhz};

type C = Complex64;

/// Common frequency change of both Kittel modes, rad/µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub delta_b: f64,
}

impl Perturbation {
    pub fn new(delta_b: f64) -> Result<Self> {
        ensure_finite("delta_b", delta_b)?;
        Ok(Self { delta_b })
    }

    pub fn from_mhz(delta_b_mhz: f64) -> Result<Self> {
        Self::new(mhz_to_rad(delta_b_mhz))
    }
}

/// The pseudo-Hermitian Hamiltonian with both magnon detunings shifted by Δ_B.
pub fn perturbed_hamiltonian(sym: &SymmetricParams, pert: &Perturbation) -> Result<Matrix3> {
    sym.require_manifold(Tolerances::default().algebraic)?;
    let g = C::new(sym.g, 0.0);
    let zero = C::new(0.0, 0.0);
    Ok([
        [C::new(0.0, 2.0 * sym.gamma), g, g],
        [g, C::new(sym.delta + pert.delta_b, -sym.gamma), zero],
        [g, zero, C::new(-sym.delta + pert.delta_b, -sym.gamma)],
    ])
}

/// Eigenvalues of the perturbed Hamiltonian.
///
/// With x = Ω′ − Δ_B the characteristic polynomial is
/// x³ + Δ_B x² + (c₁ + 2iγΔ_B) x + c₀ − Δ_B(γ² + Δ²) = 0, which reuses the
/// unperturbed coefficients and keeps the EP3 degeneracy exact at Δ_B = 0.
pub fn perturbed_eigenvalues(sym: &SymmetricParams, pert: &Perturbation) -> ComplexTriple {
    let k = cubic_coeffs(sym);
    let db = pert.delta_b;
    let a2 = C::new(db, 0.0);
    let a1 = k.c1 + C::new(0.0, 2.0 * sym.gamma * db);
    let a0 = k.c0 - db * (sym.gamma * sym.gamma + sym.delta * sym.delta);
    monic_cubic_roots(a2, a1, a0).shifted(a2)
}

/// Number of continuation sub-steps from Δ_B = 0 to the target.
const CONTINUATION_STEPS: usize = 48;

/// Trust radius for one continuation step, in units of γ.
const TRUST_RADIUS: f64 = 0.5;

fn trust_radius(sym: &SymmetricParams) -> f64 {
    let scale = if sym.gamma > 0.0 { sym.gamma } else { sym.g };
    TRUST_RADIUS * scale
}

/// Picks the root that continues Ω⁽⁰⁾ = 0 for a first, tiny Δ_B.
///
/// Away from the EP3 the other two branches sit at ±√(3g² − 4γ²) and the
/// nearest root to the origin is unambiguous. At the EP3 all three emerge
/// from the origin together; the central one is then the most nearly real,
/// with ties going to the root whose real part follows the sign of Δ_B.
fn initial_central_root(sym: &SymmetricParams, roots: &ComplexTriple, delta_b: f64) -> C {
    let mut by_norm = roots.0;
    by_norm.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let separated = manifold_splitting(sym.gamma, sym.g).norm() > 0.0
        && by_norm[1].norm() > 3.0 * by_norm[0].norm();
    if separated {
        return by_norm[0];
    }
    roots
        .0
        .iter()
        .copied()
        .min_by(|a, b| {
            let key = |z: &C| (z.im.abs(), if z.re * delta_b >= 0.0 { 0 } else { 1 });
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1))
        })
        .expect("three roots")
}

fn nearest(roots: &ComplexTriple, to: C) -> (C, f64) {
    roots
        .0
        .iter()
        .map(|&z| (z, (z - to).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three roots")
}

fn continue_branch(
    sym: &SymmetricParams,
    mut current: C,
    path: impl Iterator<Item = f64>,
) -> Result<C> {
    let radius = trust_radius(sym);
    for delta_b in path {
        let roots = perturbed_eigenvalues(sym, &Perturbation { delta_b });
        let (next, distance) = nearest(&roots, current);
        if distance > radius {
            return Err(Error::BranchLost {
                delta_b,
                distance,
                radius,
            });
        }
        current = next;
    }
    Ok(current)
}

fn central_from_origin(sym: &SymmetricParams, delta_b: f64) -> Result<C> {
    if delta_b == 0.0 {
        return Ok(C::new(0.0, 0.0));
    }
    let n = CONTINUATION_STEPS as f64;
    // Cubic spacing keeps the Δ_B^{1/3} motion at the EP3 evenly stepped.
    let step = |k: usize| delta_b * (k as f64 / n).powi(3);
    let first = step(1);
    let roots = perturbed_eigenvalues(sym, &Perturbation { delta_b: first });
    let start = initial_central_root(sym, &roots, delta_b);
    let radius = trust_radius(sym);
    if start.norm() > radius {
        return Err(Error::BranchLost {
            delta_b: first,
            distance: start.norm(),
            radius,
        });
    }
    continue_branch(sym, start, (2..=CONTINUATION_STEPS).map(step))
}

/// Complex eigenvalue on the branch continued from Ω⁽⁰⁾ = 0.
pub fn central_eigenvalue(sym: &SymmetricParams, pert: &Perturbation) -> Result<C> {
    sym.require_manifold(Tolerances::default().algebraic)?;
    ensure_finite("delta_b", pert.delta_b)?;
    central_from_origin(sym, pert.delta_b)
}

/// Δ_ω = Re Ω′ − 0 of the central branch under perturbation, rad/µs.
pub fn exact_eigenshift(sym: &SymmetricParams, pert: &Perturbation) -> Result<f64> {
    Ok(central_eigenvalue(sym, pert)?.re)
}

/// Central-branch eigenvalues along a sequence of perturbations, continued
/// from one point to the next. Crossing or touching Δ_B = 0 restarts the
/// continuation from the origin.
pub fn central_eigenvalue_sweep(sym: &SymmetricParams, delta_bs: &[f64]) -> Result<Vec<C>> {
    sym.require_manifold(Tolerances::default().algebraic)?;
    let mut out = Vec::with_capacity(delta_bs.len());
    let mut previous: Option<(f64, C)> = None;
    for &db in delta_bs {
        ensure_finite("delta_b", db)?;
        let z = match previous {
            Some((prev_db, prev_z)) if prev_db * db > 0.0 => {
                const SUBSTEPS: usize = 16;
                let path = (1..=SUBSTEPS).map(|k| prev_db + (db - prev_db) * (k as f64 / SUBSTEPS as f64));
                continue_branch(sym, prev_z, path)?
            }
            _ => central_from_origin(sym, db)?,
        };
        out.push(z);
        previous = Some((db, z));
    }
    Ok(out)
}

/// First-order relation between the shifted central eigenvalue Ω′ and Δ_B:
///
/// Δ_B = [Ω′³(Ω′² + g²) − a(Ω′² + g²)Ω′] / [g⁴ + 2Ω′²(Ω′² + 2g²) − a(4Ω′² + g²)]
///
/// with a = 3g² − 4γ².
pub fn delta_b_of_shift(sym: &SymmetricParams, omega_prime: f64) -> Result<f64> {
    sym.require_manifold(Tolerances::default().algebraic)?;
    ensure_finite("omega_prime", omega_prime)?;
    let g2 = sym.g * sym.g;
    let a = manifold_splitting(sym.gamma, sym.g);
    let a = (a * a).re;
    let w = omega_prime;
    let w2 = w * w;
    let numerator = w2 * w * (w2 + g2) - a * (w2 + g2) * w;
    let terms = [g2 * g2, 2.0 * w2 * (w2 + 2.0 * g2), a * (4.0 * w2 + g2)];
    let denominator = terms[0] + terms[1] - terms[2];
    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    if denominator.abs() <= 16.0 * f64::EPSILON * magnitude {
        return Err(Error::SingularRelation { omega_prime });
    }
    Ok(numerator / denominator)
}

/// Δ_ω = g_EP3^{2/3} Δ_B^{1/3}, extended as an odd function to Δ_B < 0.
pub fn cube_root_response(g_ep3: f64, delta_b: f64) -> f64 {
    g_ep3.powf(2.0 / 3.0) * delta_b.cbrt()
}

/// Δ_ω = (1 − g²/(3g² − 4γ²)) Δ_B away from the EP3.
pub fn linear_response(sym: &SymmetricParams, delta_b: f64) -> Result<f64> {
    sym.require_manifold(Tolerances::default().algebraic)?;
    let a = manifold_splitting(sym.gamma, sym.g);
    let a = (a * a).re;
    if a == 0.0 {
        return Err(Error::InvalidParameter {
            name: "g",
            value: sym.g,
            reason: "the response is not linear at the EP3; use cube_root_response",
        });
    }
    Ok((1.0 - sym.g * sym.g / a) * delta_b)
}

/// G_EP3 = g_EP3^{2/3} |Δ_B|^{−2/3}; +∞ at Δ_B = 0.
pub fn g_ep3_factor(g_ep3: f64, delta_b: f64) -> f64 {
    if delta_b == 0.0 {
        return f64::INFINITY;
    }
    (g_ep3 / delta_b.abs()).powf(2.0 / 3.0)
}

/// G_CPA = (dip_perturbed − dip_unperturbed) / (Δ_ω/2π), dB per MHz.
pub fn g_cpa_factor(dip_unperturbed_db: f64, dip_perturbed_db: f64, delta_omega_mhz: f64) -> Result<f64> {
    ensure_finite("dip_unperturbed_db", dip_unperturbed_db)?;
    ensure_finite("dip_perturbed_db", dip_perturbed_db)?;
    ensure_positive("delta_omega", delta_omega_mhz)?;
    Ok((dip_perturbed_db - dip_unperturbed_db) / delta_omega_mhz)
}

/// G_syn = G_CPA · G_EP3, dB per MHz.
pub fn synthetic_sensitivity(g_cpa: f64, g_ep3: f64) -> f64 {
    g_cpa * g_ep3
}

/// δB_min = δA / (ν_e G_syn) in tesla, with ν_e = γ_e/2π given in GHz/T.
pub fn detectable_b_min(delta_a_db: f64, g_syn: f64, gyro_ghz_per_tesla: f64) -> Result<f64> {
    ensure_positive("delta_a", delta_a_db)?;
    ensure_positive("g_syn", g_syn)?;
    ensure_positive("gamma_e", gyro_ghz_per_tesla)?;
    Ok(delta_a_db / (ghz_per_tesla_to_mhz_per_tesla(gyro_ghz_per_tesla) * g_syn))
}

/// Least-squares line through log₁₀Δ_ω versus log₁₀|Δ_B|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Fits the log-log slope of (Δ_B, Δ_ω) pairs with |Δ_B| inside `window`
/// (inclusive). Units cancel in the slope; the intercept is in log₁₀ units
/// of whatever the inputs carry.
pub fn fit_loglog_slope(points: &[(f64, f64)], window: (f64, f64)) -> Result<SlopeFit> {
    let (lo, hi) = window;
    let selected: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, _)| {
            let x = x.abs();
            x >= lo && x <= hi
        })
        .map(|&(x, y)| (x.abs(), y))
        .collect();
    let usable: Vec<(f64, f64)> = selected
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|&(x, y)| (x.log10(), y.log10()))
        .collect();
    if usable.len() < MIN_FIT_POINTS || usable.len() != selected.len() {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_POINTS,
            found: usable.len(),
        });
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: 1,
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = usable
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        window,
        points: usable.len(),
    })
}

/// Sensitivity figures of merit in the units they are quoted in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    #[serde(rename = "delta_b_mhz")]
    pub delta_b: f64,
    #[serde(rename = "delta_omega_mhz")]
    pub delta_omega: f64,
    pub g_ep3: f64,
    #[serde(rename = "g_cpa_db_per_mhz")]
    pub g_cpa: f64,
    #[serde(rename = "g_syn_db_per_mhz")]
    pub g_syn: f64,
    #[serde(rename = "delta_b_min_tesla")]
    pub delta_b_min: f64,
}

impl SensitivityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Inputs of the sensitivity chain other than the operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSettings {
    pub kappa1: f64,
    pub kappa2: f64,
    /// Clamp for the dB channel; the unperturbed CPA dip lands on it.
    pub floor_db: f64,
    /// γ_e/2π, GHz/T.
    pub gyro_ghz_per_tesla: f64,
    /// Smallest resolvable spectrum change, dB.
    pub delta_a_db: f64,
    /// Probe grid, MHz.
    pub grid: Vec<f64>,
}

impl ChainSettings {
    /// Device ports, YIG gyromagnetic ratio, analyser resolution and the
    /// default ±10 MHz grid, with the given floor.
    pub fn device(floor_db: f64) -> Self {
        use crate::params::defaults::*;
        Self {
            kappa1: mhz_to_rad(KAPPA1_MHZ),
            kappa2: mhz_to_rad(KAPPA2_MHZ),
            floor_db,
            gyro_ghz_per_tesla: GYRO_GHZ_PER_T,
            delta_a_db: DELTA_A_DB,
            grid: crate::spectrum::default_grid(),
        }
    }
}

/// Every intermediate of the sensitivity chain at the EP3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityChain {
    pub report: SensitivityReport,
    pub drive: DriveParams,
    pub unperturbed_dip: DipReport,
    pub perturbed_dip: DipReport,
    /// Re Ω′ of the exact central branch, MHz.
    pub exact_shift_mhz: f64,
}

fn spectrum_dip(params: &SystemParams, drive: &DriveParams, settings: &ChainSettings) -> Result<DipReport> {
    let trace = total_output_spectrum(params, drive, &settings.grid, settings.floor_db)?;
    find_dip(&trace, |nu| {
        total_output(params, drive, mhz_to_rad(nu)).unwrap_or(f64::INFINITY)
    })
}

/// Runs the sensitivity chain for a system at its EP3 with damping `gamma`
/// and perturbation `delta_b` (both rad/µs).
///
/// The drive is trimmed to CPA for the unperturbed system and held fixed
/// under the perturbation. Δ_ω is the cube-root law value, so that
/// G_CPA · G_EP3 equals the dip change per unit Δ_B/2π.
pub fn sensitivity_chain(gamma: f64, delta_b: f64, settings: &ChainSettings) -> Result<SensitivityChain> {
    ensure_positive("gamma", gamma)?;
    ensure_positive("delta_b", delta_b.abs())?;
    let sym = SymmetricParams::ep3(gamma)?;
    let base = SystemParams::from_symmetric(&sym, settings.kappa1, settings.kappa2)?;
    let drive = cpa_drive(&base)?;
    let unperturbed_dip = spectrum_dip(&base, &drive, settings)?;
    let perturbed_dip = spectrum_dip(&base.with_magnon_shift(delta_b), &drive, settings)?;

    let delta_omega = cube_root_response(sym.g, delta_b).abs();
    let g_ep3 = g_ep3_factor(sym.g, delta_b);
    let g_cpa = g_cpa_factor(
        unperturbed_dip.dip_value_db,
        perturbed_dip.dip_value_db,
        rad_to_mhz(delta_omega),
    )?;
    let g_syn = synthetic_sensitivity(g_cpa, g_ep3);
    let delta_b_min = detectable_b_min(settings.delta_a_db, g_syn, settings.gyro_ghz_per_tesla)?;
    let exact = exact_eigenshift(&sym, &Perturbation { delta_b })?;
    Ok(SensitivityChain {
        report: SensitivityReport {
            delta_b: rad_to_mhz(delta_b),
            delta_omega: rad_to_mhz(delta_omega),
            g_ep3,
            g_cpa,
            g_syn,
            delta_b_min,
        },
        drive,
        unperturbed_dip,
        perturbed_dip,
        exact_shift_mhz: rad_to_mhz(exact),
    })
}
