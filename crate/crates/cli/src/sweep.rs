//! Evaluation of one quantity along one sweep axis.

use ep3sense_core::cubic::ComplexTriple;
use ep3sense_core::eigen::{build_hamiltonian, matrix_eigenvalues, symmetric_eigenvalues, symmetric_eigenvalues_from_delta_sq};
use ep3sense_core::params::Tolerances;
use ep3sense_core::sensing::{central_eigenvalue_sweep, perturbed_eigenvalues, sensitivity_chain, ChainSettings, Perturbation};
use ep3sense_core::spectrum::{default_grid, find_dip, total_output, total_output_spectrum};
use ep3sense_core::units::{mhz_to_rad, rad_to_mhz};
use ep3sense_core::{Complex64, DipReport, DriveParams, SystemParams};

use crate::config::{Axis, Quantity, RunConfig, SystemSpec};
use crate::error::{CliError, Result};
use crate::table::Table;

pub fn run_sweep(config: &RunConfig) -> Result<Table> {
    let xs = config.sweep.values();
    match (config.sweep.quantity, config.sweep.axis) {
        (Quantity::Eigenvalues, Axis::G) => eigenvalues_vs_g(&config.system, &xs),
        (Quantity::Eigenvalues, Axis::DeltaB) => eigenvalues_vs_delta_b(&config.system, &xs),
        (Quantity::Dip, Axis::DeltaB) => dip_vs_delta_b(config, &xs),
        (Quantity::Dip, Axis::G) => dip_vs_g(config, &xs),
        (Quantity::Sensitivity, Axis::DeltaB) => sensitivity_vs_delta_b(config, &xs),
        (Quantity::Spectrum, Axis::Omega) => spectrum_table(config, &xs, 0.0),
        (q, a) => Err(CliError::validation(format!(
            "quantity \"{}\" cannot be swept along \"{}\"",
            q.name(),
            a.name()
        ))),
    }
}

fn eigen_columns(axis: &str) -> Table {
    Table::new([axis, "re0_mhz", "im0_mhz", "re1_mhz", "im1_mhz", "re2_mhz", "im2_mhz"])
}

/// Zeroes real or imaginary parts below 1e-12 of the largest root, which
/// are rounding residue rather than model content.
pub fn cleaned(roots: &ComplexTriple) -> ComplexTriple {
    let tol = 1e-12 * roots.max_norm().max(f64::MIN_POSITIVE);
    let snap = |v: f64| if v.abs() <= tol { 0.0 } else { v };
    roots.map(|z| Complex64::new(snap(z.re), snap(z.im)))
}

fn eigen_row(x: f64, roots: &ComplexTriple) -> Vec<f64> {
    let mut row = vec![x];
    for z in cleaned(roots).0 {
        row.push(rad_to_mhz(z.re));
        row.push(rad_to_mhz(z.im));
    }
    row
}

/// Orders roots by real part, then imaginary part.
pub fn sorted(roots: &ComplexTriple) -> ComplexTriple {
    let mut r = roots.0;
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ComplexTriple(r)
}

/// Eigenvalues continued along a sequence of parameter points: the first
/// point is sorted, every later one is matched to its predecessor.
pub fn continued(points: impl IntoIterator<Item = ComplexTriple>) -> Vec<ComplexTriple> {
    let mut out: Vec<ComplexTriple> = Vec::new();
    for roots in points {
        let next = match out.last() {
            Some(prev) => roots.matched_to(prev),
            None => sorted(&roots),
        };
        out.push(next);
    }
    out
}

/// Manifold eigenvalues for coupling `g`, continuing below g = γ with
/// Δ² = g² − γ² < 0.
pub fn manifold_roots(gamma: f64, g: f64) -> ComplexTriple {
    symmetric_eigenvalues_from_delta_sq(gamma, g, (g - gamma) * (g + gamma))
}

fn eigenvalues_vs_g(system: &SystemSpec, gs: &[f64]) -> Result<Table> {
    let roots: Vec<ComplexTriple> = match *system {
        SystemSpec::Symmetric {
            gamma_mhz,
            delta_mhz: None,
            ..
        } => gs
            .iter()
            .map(|&g| manifold_roots(mhz_to_rad(gamma_mhz), mhz_to_rad(g)))
            .collect(),
        SystemSpec::Symmetric { .. } => gs
            .iter()
            .map(|&g| Ok(symmetric_eigenvalues(&system.with_g(g).symmetric()?.expect("symmetric form"))))
            .collect::<ep3sense_core::Result<_>>()?,
        SystemSpec::Full { .. } => gs
            .iter()
            .map(|&g| Ok(matrix_eigenvalues(&build_hamiltonian(&system.with_g(g).params()?))))
            .collect::<ep3sense_core::Result<_>>()?,
    };
    let mut t = eigen_columns("g_mhz");
    for (&g, r) in gs.iter().zip(continued(roots)) {
        t.push(eigen_row(g, &r));
    }
    Ok(t)
}

fn eigenvalues_vs_delta_b(system: &SystemSpec, dbs: &[f64]) -> Result<Table> {
    if let Some(sym) = system.symmetric()? {
        if sym.is_on_manifold(Tolerances::default().algebraic) {
            let rad: Vec<f64> = dbs.iter().map(|&d| mhz_to_rad(d)).collect();
            let central = central_eigenvalue_sweep(&sym, &rad)?;
            let roots = rad.iter().map(|&d| perturbed_eigenvalues(&sym, &Perturbation { delta_b: d }));
            let mut t = eigen_columns("delta_b_mhz");
            t.columns.extend(["central_re_mhz".into(), "central_im_mhz".into()]);
            for ((&db, r), c) in dbs.iter().zip(continued(roots)).zip(central) {
                let mut row = eigen_row(db, &r);
                row.extend([rad_to_mhz(c.re), rad_to_mhz(c.im)]);
                t.push(row);
            }
            return Ok(t);
        }
    }
    let base = system.params()?;
    let roots = dbs
        .iter()
        .map(|&d| matrix_eigenvalues(&build_hamiltonian(&base.with_magnon_shift(mhz_to_rad(d)))));
    let mut t = eigen_columns("delta_b_mhz");
    for (&db, r) in dbs.iter().zip(continued(roots)) {
        t.push(eigen_row(db, &r));
    }
    Ok(t)
}

/// Deepest point of |S_tot|² on the default ±10 MHz grid, refined.
pub fn spectrum_dip(params: &SystemParams, drive: &DriveParams, floor_db: f64) -> ep3sense_core::Result<DipReport> {
    let trace = total_output_spectrum(params, drive, &default_grid(), floor_db)?;
    find_dip(&trace, |nu| total_output(params, drive, mhz_to_rad(nu)).unwrap_or(f64::INFINITY))
}

fn dip_columns(axis: &str) -> Table {
    Table::new([axis, "dip_location_mhz", "dip_value_linear", "dip_value_db"])
}

fn dip_vs_delta_b(config: &RunConfig, dbs: &[f64]) -> Result<Table> {
    let base = config.system.params()?;
    let drive = config.drive.resolve(&base)?;
    let sym = config
        .system
        .symmetric()?
        .filter(|s| s.is_on_manifold(Tolerances::default().algebraic));
    let mut t = dip_columns("delta_b_mhz");
    let central = match &sym {
        Some(s) => {
            t.columns.push("exact_shift_mhz".into());
            let rad: Vec<f64> = dbs.iter().map(|&d| mhz_to_rad(d)).collect();
            Some(central_eigenvalue_sweep(s, &rad)?)
        }
        None => None,
    };
    for (i, &db) in dbs.iter().enumerate() {
        let dip = spectrum_dip(&base.with_magnon_shift(mhz_to_rad(db)), &drive, config.floor_db)?;
        let mut row = vec![db, dip.dip_location, dip.dip_value, dip.dip_value_db];
        if let Some(c) = &central {
            row.push(rad_to_mhz(c[i].re));
        }
        t.push(row);
    }
    Ok(t)
}

fn dip_vs_g(config: &RunConfig, gs: &[f64]) -> Result<Table> {
    let mut t = dip_columns("g_mhz");
    for &g in gs {
        let params = config.system.with_g(g).params()?;
        let drive = config.drive.resolve(&params)?;
        let dip = spectrum_dip(&params, &drive, config.floor_db)?;
        t.push(vec![g, dip.dip_location, dip.dip_value, dip.dip_value_db]);
    }
    Ok(t)
}

pub const SENSITIVITY_COLUMNS: [&str; 8] = [
    "delta_b_mhz",
    "delta_omega_mhz",
    "g_ep3",
    "g_cpa_db_per_mhz",
    "g_syn_db_per_mhz",
    "delta_b_min_tesla",
    "exact_shift_mhz",
    "dip_location_mhz",
];

/// Chain settings for a symmetric EP3 system described by `config`.
pub fn chain_settings(config: &RunConfig) -> Result<(f64, ChainSettings)> {
    match config.system {
        SystemSpec::Symmetric {
            gamma_mhz,
            g_mhz: None,
            delta_mhz: None,
            kappa1_mhz,
            kappa2_mhz,
        } => {
            let mut settings = ChainSettings::device(config.floor_db);
            settings.kappa1 = mhz_to_rad(kappa1_mhz);
            settings.kappa2 = mhz_to_rad(kappa2_mhz);
            if config.drive != crate::config::DriveSpec::Cpa {
                return Err(CliError::validation("the sensitivity chain uses the CPA drive; set drive.mode = \"cpa\""));
            }
            Ok((mhz_to_rad(gamma_mhz), settings))
        }
        _ => Err(CliError::validation(
            "the sensitivity chain runs at the EP3 of a symmetric system; remove system.g_mhz and system.delta_mhz",
        )),
    }
}

fn sensitivity_vs_delta_b(config: &RunConfig, dbs: &[f64]) -> Result<Table> {
    let (gamma, settings) = chain_settings(config)?;
    let mut t = Table::new(SENSITIVITY_COLUMNS);
    for &db in dbs {
        let c = sensitivity_chain(gamma, mhz_to_rad(db), &settings)?;
        let r = c.report;
        t.push(vec![
            r.delta_b,
            r.delta_omega,
            r.g_ep3,
            r.g_cpa,
            r.g_syn,
            r.delta_b_min,
            c.exact_shift_mhz,
            c.perturbed_dip.dip_location,
        ]);
    }
    Ok(t)
}

/// |S_tot|² on `grid` (MHz) with both magnons shifted by `delta_b_mhz`.
/// The drive is resolved for the unshifted system.
pub fn spectrum_table(config: &RunConfig, grid: &[f64], delta_b_mhz: f64) -> Result<Table> {
    let base = config.system.params()?;
    let drive = config.drive.resolve(&base)?;
    let trace = total_output_spectrum(&base.with_magnon_shift(mhz_to_rad(delta_b_mhz)), &drive, grid, config.floor_db)?;
    let mut t = Table::new(["omega_mhz", "s_tot_linear", "s_tot_db"]);
    for i in 0..trace.len() {
        t.push(vec![trace.grid[i], trace.values[i], trace.values_db[i]]);
    }
    Ok(t)
}
