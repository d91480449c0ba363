use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ep3sense::commands::{self, ReportArgs};
use ep3sense::config::{Layer, RunConfig};
use ep3sense::figures::Figure;
use ep3sense::Result;
use ep3sense_core::spectrum::linear_grid;

#[derive(Parser)]
#[command(name = "ep3sense", version, about = "EP3 and coherent-perfect-absorption sensing model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2,
    Fig3c,
    Fig3d,
    Fig3f,
    Fig4,
}

impl From<FigureArg> for Figure {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig2 => Figure::Fig2,
            FigureArg::Fig3c => Figure::Fig3c,
            FigureArg::Fig3d => Figure::Fig3d,
            FigureArg::Fig3f => Figure::Fig3f,
            FigureArg::Fig4 => Figure::Fig4,
        }
    }
}

#[derive(clap::Args, Default)]
struct ConfigArgs {
    /// TOML run configuration layered over the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    floor_db: Option<f64>,
    #[arg(long)]
    gamma_mhz: Option<f64>,
    #[arg(long)]
    g_mhz: Option<f64>,
    /// Output file; standard output if omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl ConfigArgs {
    fn layer(&self) -> Layer {
        let mut l = Layer::default();
        if let Some(v) = self.floor_db {
            l.set_num("floor_db", "--floor-db", v);
        }
        if let Some(v) = self.gamma_mhz {
            l.set_num("system.gamma_mhz", "--gamma-mhz", v);
        }
        if let Some(v) = self.g_mhz {
            l.set_num("system.g_mhz", "--g-mhz", v);
        }
        if let Some(p) = &self.output {
            l.set_text("output.path", "--output", p.display().to_string());
        }
        if let Some(f) = &self.format {
            l.set_text("output.format", "--format", f.clone());
        }
        l
    }
}

#[derive(Subcommand)]
enum Command {
    /// Locate the third-order exceptional point for a given damping.
    Ep3 {
        #[arg(long)]
        gamma_mhz: f64,
        #[arg(long)]
        json: bool,
    },
    /// Write the model data behind one figure as CSV files.
    Reproduce {
        #[arg(value_enum)]
        figure: FigureArg,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Evaluate a quantity along the configured sweep axis.
    Sweep {
        #[command(flatten)]
        common: ConfigArgs,
        /// g_mhz, delta_b_mhz or omega_mhz.
        #[arg(long)]
        axis: Option<String>,
        /// eigenvalues, dip, sensitivity or spectrum.
        #[arg(long)]
        quantity: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        points: Option<i64>,
        /// linear or log.
        #[arg(long)]
        scale: Option<String>,
    },
    /// Total output spectrum |S_tot|^2 of the configured system.
    Spectrum {
        #[command(flatten)]
        common: ConfigArgs,
        /// Shift applied to both magnon frequencies, MHz.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta_b_mhz: f64,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        stop: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Sensitivity report at the EP3 as JSON.
    Report {
        #[arg(long, default_value_t = 0.025, allow_hyphen_values = true)]
        delta_b_mhz: f64,
        #[arg(long, default_value_t = -91.5, allow_hyphen_values = true)]
        floor_db: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma_mhz: f64,
        #[arg(long, default_value_t = 4.0)]
        kappa1_mhz: f64,
        #[arg(long, default_value_t = 4.0)]
        kappa2_mhz: f64,
        /// Include drive, dips and the exact eigenshift.
        #[arg(long)]
        diagnostics: bool,
    },
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Ep3 { gamma_mhz, json } => commands::ep3(gamma_mhz, json, out),
        Command::Reproduce { figure, out_dir } => {
            for path in commands::reproduce(figure.into(), &out_dir)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(())
        }
        Command::Sweep {
            common,
            axis,
            quantity,
            start,
            stop,
            points,
            scale,
        } => {
            let mut layer = common.layer();
            if let Some(v) = axis {
                layer.set_text("sweep.axis", "--axis", v);
            }
            if let Some(v) = quantity {
                layer.set_text("sweep.quantity", "--quantity", v);
            }
            if let Some(v) = start {
                layer.set_num("sweep.start", "--start", v);
            }
            if let Some(v) = stop {
                layer.set_num("sweep.stop", "--stop", v);
            }
            if let Some(v) = points {
                layer.set_count("sweep.points", "--points", v);
            }
            if let Some(v) = scale {
                layer.set_text("sweep.scale", "--scale", v);
            }
            let config = RunConfig::load(common.config.as_deref(), layer)?;
            commands::sweep(&config, out)
        }
        Command::Spectrum {
            common,
            delta_b_mhz,
            start,
            stop,
            points,
        } => {
            let config = RunConfig::load(common.config.as_deref(), common.layer())?;
            commands::spectrum(&config, &linear_grid(start, stop, points), delta_b_mhz, out)
        }
        Command::Report {
            delta_b_mhz,
            floor_db,
            gamma_mhz,
            kappa1_mhz,
            kappa2_mhz,
            diagnostics,
        } => commands::report(
            &ReportArgs {
                delta_b_mhz,
                floor_db,
                gamma_mhz,
                kappa1_mhz,
                kappa2_mhz,
                diagnostics,
            },
            out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out).and_then(|()| out.flush().map_err(Into::into)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
