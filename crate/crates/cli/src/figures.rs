//! Plot-ready data for the model curves of each figure, at the device
//! defaults: γ/2π = 3 MHz, κ₁/2π = κ₂/2π = 4 MHz, κ_int/2π = 2 MHz.

use std::fmt;
use std::str::FromStr;

use ep3sense_core::eigen::{ep2_delta_squared, locate_ep3, symmetric_eigenvalues};
use ep3sense_core::params::defaults;
use ep3sense_core::sensing::{
    central_eigenvalue_sweep, fit_loglog_slope, g_ep3_factor, sensitivity_chain, ChainSettings,
};
use ep3sense_core::spectrum::{cpa_drive, default_grid, linear_grid, total_output_spectrum};
use ep3sense_core::units::{mhz_to_rad, rad_to_mhz};
use ep3sense_core::{SymmetricParams, SystemParams};

use crate::error::{CliError, Result};
use crate::sweep::{cleaned, continued, manifold_roots, sorted};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3c,
    Fig3d,
    Fig3f,
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig2, Figure::Fig3c, Figure::Fig3d, Figure::Fig3f, Figure::Fig4];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3c => "fig3c",
            Figure::Fig3d => "fig3d",
            Figure::Fig3f => "fig3f",
            Figure::Fig4 => "fig4",
        }
    }

    /// Output files, by name, in a fixed order.
    pub fn tables(&self) -> Result<Vec<(&'static str, Table)>> {
        match self {
            Figure::Fig2 => fig2(),
            Figure::Fig3c => fig3c(),
            Figure::Fig3d => fig3d(),
            Figure::Fig3f => fig3f(),
            Figure::Fig4 => fig4(),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::validation(format!("unknown figure \"{s}\"; expected one of fig2, fig3c, fig3d, fig3f, fig4")))
    }
}

fn gamma() -> f64 {
    mhz_to_rad(defaults::GAMMA_MHZ)
}

fn ep3() -> Result<SymmetricParams> {
    Ok(SymmetricParams::ep3(gamma())?)
}

fn away() -> Result<SymmetricParams> {
    Ok(SymmetricParams::on_manifold(gamma(), mhz_to_rad(defaults::G_AWAY_MHZ))?)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    linear_grid(lo.log10(), hi.log10(), points)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

fn push_roots(row: &mut Vec<f64>, roots: &ep3sense_core::cubic::ComplexTriple) {
    for z in cleaned(roots).0 {
        row.push(rad_to_mhz(z.re));
        row.push(rad_to_mhz(z.im));
    }
}

const ROOT_COLUMNS: [&str; 6] = ["re0_mhz", "im0_mhz", "re1_mhz", "im1_mhz", "re2_mhz", "im2_mhz"];

fn fig2() -> Result<Vec<(&'static str, Table)>> {
    let gamma = gamma();

    let mut surfaces = Table::new(["g_mhz", "delta_mhz"].into_iter().chain(ROOT_COLUMNS));
    for g in linear_grid(0.0, 8.0, 81) {
        for d in linear_grid(0.0, 5.0, 51) {
            let sym = SymmetricParams::new(gamma, mhz_to_rad(g), mhz_to_rad(d))?;
            let mut row = vec![g, d];
            push_roots(&mut row, &sorted(&symmetric_eigenvalues(&sym)));
            surfaces.push(row);
        }
    }

    let mut lines = Table::new(["g_mhz", "delta_ep2_0_mhz", "delta_ep2_1_mhz", "delta_ep2_2_mhz"]);
    for g in linear_grid(0.0, 8.0, 161) {
        let mut row = vec![g];
        let roots = ep2_delta_squared(gamma, mhz_to_rad(g));
        for k in 0..3 {
            row.push(roots.get(k).map_or(f64::NAN, |x| rad_to_mhz(x.sqrt())));
        }
        lines.push(row);
    }

    let gs = linear_grid(0.0, 8.0, 161);
    let mut manifold = Table::new(["g_mhz"].into_iter().chain(ROOT_COLUMNS));
    let roots = continued(gs.iter().map(|&g| manifold_roots(gamma, mhz_to_rad(g))));
    for (&g, r) in gs.iter().zip(&roots) {
        let mut row = vec![g];
        push_roots(&mut row, r);
        manifold.push(row);
    }

    let p = locate_ep3(gamma)?;
    let mut point = Table::new(["gamma_mhz", "g_ep3_mhz", "delta_ep3_mhz"]);
    point.push(vec![defaults::GAMMA_MHZ, rad_to_mhz(p.g_ep3), rad_to_mhz(p.delta_ep3)]);

    Ok(vec![
        ("fig2_surfaces.csv", surfaces),
        ("fig2_ep2_lines.csv", lines),
        ("fig2_manifold.csv", manifold),
        ("fig2_ep3.csv", point),
    ])
}

/// Log-spaced Δ_B/2π values of the slope panel, MHz.
pub fn fig3c_delta_b() -> Vec<f64> {
    log_grid(1e-4, 1e-2, 50)
}

fn shifts_mhz(sym: &SymmetricParams, dbs_mhz: &[f64]) -> Result<Vec<f64>> {
    let rad: Vec<f64> = dbs_mhz.iter().map(|&d| mhz_to_rad(d)).collect();
    Ok(central_eigenvalue_sweep(sym, &rad)?
        .into_iter()
        .map(|z| rad_to_mhz(z.re))
        .collect())
}

fn fig3c() -> Result<Vec<(&'static str, Table)>> {
    let (at, off) = (ep3()?, away()?);
    let dbs = fig3c_delta_b();
    let s_ep3 = shifts_mhz(&at, &dbs)?;
    let s_away = shifts_mhz(&off, &dbs)?;
    let mut shifts = Table::new(["delta_b_mhz", "shift_ep3_mhz", "shift_away_mhz"]);
    for i in 0..dbs.len() {
        shifts.push(vec![dbs[i], s_ep3[i], s_away[i]]);
    }

    let mut fits = Table::new(["g_mhz", "slope", "intercept", "r_squared"]);
    for (sym, s) in [(&at, &s_ep3), (&off, &s_away)] {
        let pts: Vec<(f64, f64)> = dbs.iter().copied().zip(s.iter().map(|v| v.abs())).collect();
        let fit = fit_loglog_slope(&pts, (1e-4, 1e-2))?;
        fits.push(vec![rad_to_mhz(sym.g), fit.slope, fit.intercept, fit.r_squared]);
    }
    Ok(vec![("fig3c_shifts.csv", shifts), ("fig3c_fits.csv", fits)])
}

fn fig3d() -> Result<Vec<(&'static str, Table)>> {
    let sym = ep3()?;
    let dbs = log_grid(1e-4, 1e-1, 61);
    let exact = shifts_mhz(&sym, &dbs)?;
    let mut t = Table::new(["delta_b_mhz", "g_ep3", "exact_shift_ratio"]);
    for (i, &db) in dbs.iter().enumerate() {
        t.push(vec![db, g_ep3_factor(sym.g, mhz_to_rad(db)), exact[i] / db]);
    }
    Ok(vec![("fig3d_ep3_factor.csv", t)])
}

/// Δ_B/2π values of the CPA and synthetic panels, MHz.
pub fn chain_delta_b() -> Vec<f64> {
    linear_grid(0.005, 0.05, 10)
}

fn experimental_chain() -> ChainSettings {
    ChainSettings::device(defaults::EXPERIMENTAL_FLOOR_DB)
}

fn fig3f() -> Result<Vec<(&'static str, Table)>> {
    let sym = ep3()?;
    let base = SystemParams::from_symmetric(&sym, mhz_to_rad(defaults::KAPPA1_MHZ), mhz_to_rad(defaults::KAPPA2_MHZ))?;
    let drive = cpa_drive(&base)?;
    let grid = default_grid();
    let floor = defaults::EXPERIMENTAL_FLOOR_DB;
    let before = total_output_spectrum(&base, &drive, &grid, floor)?;
    let after = total_output_spectrum(&base.with_magnon_shift(mhz_to_rad(defaults::DELTA_B_MHZ)), &drive, &grid, floor)?;
    let mut spectra = Table::new(["omega_mhz", "s_tot_db_unperturbed", "s_tot_db_perturbed"]);
    for (i, &nu) in grid.iter().enumerate() {
        spectra.push(vec![nu, before.values_db[i], after.values_db[i]]);
    }

    let settings = experimental_chain();
    let mut cpa = Table::new(["delta_b_mhz", "delta_omega_mhz", "dip_location_mhz", "dip_db", "g_cpa_db_per_mhz"]);
    for db in chain_delta_b() {
        let c = sensitivity_chain(sym.gamma, mhz_to_rad(db), &settings)?;
        cpa.push(vec![
            db,
            c.report.delta_omega,
            c.perturbed_dip.dip_location,
            c.perturbed_dip.dip_value_db,
            c.report.g_cpa,
        ]);
    }
    Ok(vec![("fig3e_spectra.csv", spectra), ("fig3f_cpa_factor.csv", cpa)])
}

fn fig4() -> Result<Vec<(&'static str, Table)>> {
    let settings = experimental_chain();
    let mut t = Table::new(["delta_b_mhz", "g_ep3", "g_cpa_db_per_mhz", "g_syn_db_per_mhz", "delta_b_min_tesla"]);
    for db in chain_delta_b() {
        let r = sensitivity_chain(gamma(), mhz_to_rad(db), &settings)?.report;
        t.push(vec![db, r.g_ep3, r.g_cpa, r.g_syn, r.delta_b_min]);
    }
    Ok(vec![("fig4_sensitivity.csv", t)])
}
