use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ep3sense_core::params::defaults;
use ep3sense_core::sensing::{sensitivity_chain, ChainSettings};
use ep3sense_core::units::{mhz_to_rad, rad_to_mhz};
use ep3sense_core::{locate_ep3, verify_ep3, Tolerances};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::figures::Figure;
use crate::sweep;
use crate::table::Table;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::File {
            path: dir.display().to_string(),
            source,
        })?;
    }
    let f = File::create(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(BufWriter::new(f))
}

/// Writes `table` to `path`, or to `out` when no path is given.
pub fn emit(table: &Table, path: Option<&Path>, format: Format, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            table.write(&mut w, format)?;
            w.flush()?;
        }
        None => table.write(out, format)?,
    }
    Ok(())
}

pub fn ep3(gamma_mhz: f64, as_json: bool, out: &mut dyn Write) -> Result<()> {
    if !(gamma_mhz > 0.0) || !gamma_mhz.is_finite() {
        return Err(CliError::validation(format!("--gamma-mhz must be positive, got {gamma_mhz}")));
    }
    let gamma = mhz_to_rad(gamma_mhz);
    let p = locate_ep3(gamma)?;
    let check = verify_ep3(gamma, &p)?;
    let (g, d) = (rad_to_mhz(p.g_ep3), rad_to_mhz(p.delta_ep3));
    if as_json {
        let doc = json!({
            "gamma_mhz": gamma_mhz,
            "g_ep3_mhz": g,
            "delta_ep3_mhz": d,
            "coalescence_verified": check.passes(gamma, &Tolerances::default()),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(out, "gamma/2pi     = {gamma_mhz:.4} MHz")?;
        writeln!(out, "g_EP3/2pi     = {g:.4} MHz")?;
        writeln!(out, "Delta_EP3/2pi = {d:.4} MHz")?;
        writeln!(
            out,
            "max |Omega| = {:.3e} MHz, eigenvector spread = {:.3e}",
            rad_to_mhz(check.max_root_norm),
            check.max_eigenvector_distance
        )?;
    }
    Ok(())
}

/// Writes every file of `figure` into `dir` and returns their paths.
pub fn reproduce(figure: Figure, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, table) in figure.tables()? {
        let path = dir.join(name);
        let mut w = create(&path)?;
        table.write_csv(&mut w)?;
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

pub fn sweep(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let table = sweep::run_sweep(config)?;
    emit(&table, config.output.path.as_deref(), config.output.format, out)
}

pub fn spectrum(config: &RunConfig, grid: &[f64], delta_b_mhz: f64, out: &mut dyn Write) -> Result<()> {
    let table = sweep::spectrum_table(config, grid, delta_b_mhz)?;
    emit(&table, config.output.path.as_deref(), config.output.format, out)
}

pub struct ReportArgs {
    pub delta_b_mhz: f64,
    pub floor_db: f64,
    pub gamma_mhz: f64,
    pub kappa1_mhz: f64,
    pub kappa2_mhz: f64,
    pub diagnostics: bool,
}

impl Default for ReportArgs {
    fn default() -> Self {
        Self {
            delta_b_mhz: defaults::DELTA_B_MHZ,
            floor_db: defaults::EXPERIMENTAL_FLOOR_DB,
            gamma_mhz: defaults::GAMMA_MHZ,
            kappa1_mhz: defaults::KAPPA1_MHZ,
            kappa2_mhz: defaults::KAPPA2_MHZ,
            diagnostics: false,
        }
    }
}

pub fn report(args: &ReportArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.delta_b_mhz > 0.0) || !args.delta_b_mhz.is_finite() {
        return Err(CliError::validation(format!(
            "--delta-b-mhz must be positive, got {}",
            args.delta_b_mhz
        )));
    }
    if !args.floor_db.is_finite() {
        return Err(CliError::validation("--floor-db must be finite"));
    }
    let mut settings = ChainSettings::device(args.floor_db);
    settings.kappa1 = mhz_to_rad(args.kappa1_mhz);
    settings.kappa2 = mhz_to_rad(args.kappa2_mhz);
    let chain = sensitivity_chain(mhz_to_rad(args.gamma_mhz), mhz_to_rad(args.delta_b_mhz), &settings)?;
    let text = if args.diagnostics {
        serde_json::to_string_pretty(&chain)?
    } else {
        chain.report.to_json()?
    };
    writeln!(out, "{text}")?;
    Ok(())
}
