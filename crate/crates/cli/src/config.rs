//! Run configuration: an embedded defaults file, an optional user file and
//! command-line overrides, layered in that order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::{Path, PathBuf};

use ep3sense_core::units::mhz_to_rad;
use ep3sense_core::{cpa_drive, DriveParams, SymmetricParams, SystemParams};
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, Result};

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

/// Where a setting came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    File { name: String, line: usize },
    Flag(&'static str),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { name, line } => write!(f, "{name}:{line}"),
            Origin::Flag(flag) => write!(f, "flag {flag}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Scalar {
    Num(f64),
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone)]
struct Setting {
    value: Scalar,
    origin: Origin,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    floor_db: Option<Spanned<f64>>,
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    drive: RawDrive,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    gamma_mhz: Option<Spanned<f64>>,
    g_mhz: Option<Spanned<f64>>,
    delta_mhz: Option<Spanned<f64>>,
    kappa1_mhz: Option<Spanned<f64>>,
    kappa2_mhz: Option<Spanned<f64>>,
    kappa_int_mhz: Option<Spanned<f64>>,
    gamma1_mhz: Option<Spanned<f64>>,
    gamma2_mhz: Option<Spanned<f64>>,
    g1_mhz: Option<Spanned<f64>>,
    g2_mhz: Option<Spanned<f64>>,
    delta1_mhz: Option<Spanned<f64>>,
    delta2_mhz: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrive {
    mode: Option<Spanned<String>>,
    p: Option<Spanned<f64>>,
    phi_rad: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Option<Spanned<String>>,
    quantity: Option<Spanned<String>>,
    start: Option<Spanned<f64>>,
    stop: Option<Spanned<f64>>,
    points: Option<Spanned<i64>>,
    scale: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<Spanned<String>>,
    format: Option<Spanned<String>>,
}

/// Symmetric-form keys; a file that gives the full form replaces them.
const SYMMETRIC_KEYS: [&str; 3] = ["system.gamma_mhz", "system.g_mhz", "system.delta_mhz"];
const FULL_KEYS: [&str; 7] = [
    "system.kappa_int_mhz",
    "system.gamma1_mhz",
    "system.gamma2_mhz",
    "system.g1_mhz",
    "system.g2_mhz",
    "system.delta1_mhz",
    "system.delta2_mhz",
];

/// Flattened settings keyed by dotted path.
#[derive(Debug, Clone, Default)]
pub struct Layer {
    entries: BTreeMap<&'static str, Setting>,
}

impl Layer {
    /// Parses one TOML document. `name` labels error locations.
    pub fn parse(name: &str, source: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(source).map_err(|e| CliError::validation(format!("{name}: {e}")))?;
        let line_of = |span: Range<usize>| source[..span.start].matches('\n').count() + 1;
        let mut layer = Layer::default();
        let mut put = |key: &'static str, span: Range<usize>, value: Scalar| {
            layer.entries.insert(
                key,
                Setting {
                    value,
                    origin: Origin::File {
                        name: name.to_string(),
                        line: line_of(span),
                    },
                },
            );
        };
        macro_rules! num {
            ($key:literal, $field:expr) => {
                if let Some(s) = $field {
                    put($key, s.span(), Scalar::Num(s.into_inner()));
                }
            };
        }
        macro_rules! text {
            ($key:literal, $field:expr) => {
                if let Some(s) = $field {
                    put($key, s.span(), Scalar::Text(s.into_inner()));
                }
            };
        }
        num!("floor_db", raw.floor_db);
        let s = raw.system;
        num!("system.gamma_mhz", s.gamma_mhz);
        num!("system.g_mhz", s.g_mhz);
        num!("system.delta_mhz", s.delta_mhz);
        num!("system.kappa1_mhz", s.kappa1_mhz);
        num!("system.kappa2_mhz", s.kappa2_mhz);
        num!("system.kappa_int_mhz", s.kappa_int_mhz);
        num!("system.gamma1_mhz", s.gamma1_mhz);
        num!("system.gamma2_mhz", s.gamma2_mhz);
        num!("system.g1_mhz", s.g1_mhz);
        num!("system.g2_mhz", s.g2_mhz);
        num!("system.delta1_mhz", s.delta1_mhz);
        num!("system.delta2_mhz", s.delta2_mhz);
        text!("drive.mode", raw.drive.mode);
        num!("drive.p", raw.drive.p);
        num!("drive.phi_rad", raw.drive.phi_rad);
        let w = raw.sweep;
        text!("sweep.axis", w.axis);
        text!("sweep.quantity", w.quantity);
        num!("sweep.start", w.start);
        num!("sweep.stop", w.stop);
        if let Some(p) = w.points {
            put("sweep.points", p.span(), Scalar::Int(p.into_inner()));
        }
        text!("sweep.scale", w.scale);
        text!("output.path", raw.output.path);
        text!("output.format", raw.output.format);
        Ok(layer)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&path.display().to_string(), &source)
    }

    fn has_any(&self, keys: &[&str]) -> bool {
        keys.iter().any(|k| self.entries.contains_key(k))
    }

    /// Layers `over` on top of `self`; keys in `over` win.
    pub fn merged(mut self, over: Layer) -> Layer {
        if over.has_any(&FULL_KEYS) {
            for k in SYMMETRIC_KEYS {
                self.entries.remove(k);
            }
        }
        if over.has_any(&SYMMETRIC_KEYS) {
            for k in FULL_KEYS {
                self.entries.remove(k);
            }
        }
        self.entries.extend(over.entries);
        self
    }

    pub fn set_num(&mut self, key: &'static str, flag: &'static str, value: f64) {
        self.set(key, flag, Scalar::Num(value));
    }

    pub fn set_text(&mut self, key: &'static str, flag: &'static str, value: impl Into<String>) {
        self.set(key, flag, Scalar::Text(value.into()));
    }

    pub fn set_count(&mut self, key: &'static str, flag: &'static str, value: i64) {
        self.set(key, flag, Scalar::Int(value));
    }

    fn set(&mut self, key: &'static str, flag: &'static str, value: Scalar) {
        self.entries.insert(
            key,
            Setting {
                value,
                origin: Origin::Flag(flag),
            },
        );
    }

    fn origin(&self, key: &str) -> String {
        self.entries
            .get(key)
            .map(|s| s.origin.to_string())
            .unwrap_or_else(|| "configuration".to_string())
    }

    fn fail<T>(&self, key: &str, msg: impl fmt::Display) -> Result<T> {
        Err(CliError::validation(format!("{}: `{key}` {msg}", self.origin(key))))
    }

    fn num(&self, key: &'static str) -> Result<Option<f64>> {
        match self.entries.get(key).map(|s| &s.value) {
            None => Ok(None),
            Some(Scalar::Num(v)) if v.is_finite() => Ok(Some(*v)),
            Some(Scalar::Num(v)) => self.fail(key, format!("must be finite, got {v}")),
            Some(_) => self.fail(key, "must be a number"),
        }
    }

    fn require_num(&self, key: &'static str) -> Result<f64> {
        match self.num(key)? {
            Some(v) => Ok(v),
            None => self.fail(key, "is required"),
        }
    }

    fn text(&self, key: &'static str) -> Result<Option<&str>> {
        match self.entries.get(key).map(|s| &s.value) {
            None => Ok(None),
            Some(Scalar::Text(t)) => Ok(Some(t)),
            Some(_) => self.fail(key, "must be a string"),
        }
    }

    fn choice<T: Copy>(&self, key: &'static str, options: &[(&str, T)]) -> Result<Option<T>> {
        let Some(t) = self.text(key)? else {
            return Ok(None);
        };
        match options.iter().find(|(name, _)| *name == t) {
            Some((_, v)) => Ok(Some(*v)),
            None => {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.fail(key, format!("must be one of {}, got \"{t}\"", names.join(", ")))
            }
        }
    }

    /// Resolves the layered settings into a validated configuration.
    pub fn resolve(&self) -> Result<RunConfig> {
        let floor_db = self.require_num("floor_db")?;
        let system = self.resolve_system()?;
        let drive = match self.choice("drive.mode", &[("cpa", false), ("manual", true)])? {
            None | Some(false) => DriveSpec::Cpa,
            Some(true) => {
                let p = self.require_num("drive.p")?;
                if p <= 0.0 {
                    return self.fail("drive.p", format!("must be positive, got {p}"));
                }
                DriveSpec::Manual {
                    p,
                    phi_rad: self.num("drive.phi_rad")?.unwrap_or(0.0),
                }
            }
        };
        let sweep = self.resolve_sweep()?;
        let format = self
            .choice("output.format", &[("csv", Format::Csv), ("json", Format::Json)])?
            .unwrap_or(Format::Csv);
        let path = self.text("output.path")?.map(PathBuf::from);
        let config = RunConfig {
            system,
            drive,
            sweep,
            output: OutputSpec { path, format },
            floor_db,
        };
        if let Err(e) = config.system.params() {
            let key = if config.system.is_full() { "system.kappa1_mhz" } else { "system.gamma_mhz" };
            return self.fail(key, format!("gives an invalid system: {e}"));
        }
        Ok(config)
    }

    fn resolve_system(&self) -> Result<SystemSpec> {
        let kappa1_mhz = self.require_num("system.kappa1_mhz")?;
        let kappa2_mhz = self.require_num("system.kappa2_mhz")?;
        if self.has_any(&FULL_KEYS) {
            if let Some(k) = SYMMETRIC_KEYS.iter().find(|k| self.entries.contains_key(*k)) {
                return self.fail(k, "cannot be combined with the full (per-sphere) system form");
            }
            return Ok(SystemSpec::Full {
                kappa1_mhz,
                kappa2_mhz,
                kappa_int_mhz: self.require_num("system.kappa_int_mhz")?,
                gamma1_mhz: self.require_num("system.gamma1_mhz")?,
                gamma2_mhz: self.require_num("system.gamma2_mhz")?,
                g1_mhz: self.require_num("system.g1_mhz")?,
                g2_mhz: self.require_num("system.g2_mhz")?,
                delta1_mhz: self.require_num("system.delta1_mhz")?,
                delta2_mhz: self.require_num("system.delta2_mhz")?,
            });
        }
        let gamma_mhz = self.require_num("system.gamma_mhz")?;
        if gamma_mhz <= 0.0 {
            return self.fail("system.gamma_mhz", format!("must be positive, got {gamma_mhz}"));
        }
        let g_mhz = self.num("system.g_mhz")?;
        if let Some(g) = g_mhz {
            if g < 0.0 {
                return self.fail("system.g_mhz", format!("must be non-negative, got {g}"));
            }
        }
        Ok(SystemSpec::Symmetric {
            gamma_mhz,
            g_mhz,
            delta_mhz: self.num("system.delta_mhz")?,
            kappa1_mhz,
            kappa2_mhz,
        })
    }

    fn resolve_sweep(&self) -> Result<SweepSpec> {
        let axis = self
            .choice(
                "sweep.axis",
                &[("g_mhz", Axis::G), ("delta_b_mhz", Axis::DeltaB), ("omega_mhz", Axis::Omega)],
            )?
            .map_or_else(|| self.fail("sweep.axis", "is required"), Ok)?;
        let quantity = self
            .choice(
                "sweep.quantity",
                &[
                    ("eigenvalues", Quantity::Eigenvalues),
                    ("dip", Quantity::Dip),
                    ("sensitivity", Quantity::Sensitivity),
                    ("spectrum", Quantity::Spectrum),
                ],
            )?
            .map_or_else(|| self.fail("sweep.quantity", "is required"), Ok)?;
        let scale = self
            .choice("sweep.scale", &[("linear", Scale::Linear), ("log", Scale::Log)])?
            .unwrap_or(Scale::Linear);
        let start = self.require_num("sweep.start")?;
        let stop = self.require_num("sweep.stop")?;
        let points = match self.entries.get("sweep.points").map(|s| &s.value) {
            Some(Scalar::Int(n)) => *n,
            Some(_) => return self.fail("sweep.points", "must be an integer"),
            None => return self.fail("sweep.points", "is required"),
        };
        if points < 2 {
            return self.fail("sweep.points", format!("must be at least 2, got {points}"));
        }
        if start == stop {
            return self.fail("sweep.stop", format!("gives a zero-length range ({start} to {stop})"));
        }
        if scale == Scale::Log && (start <= 0.0 || stop <= 0.0) {
            return self.fail("sweep.scale", "\"log\" needs a strictly positive range");
        }
        let allowed = match quantity {
            Quantity::Eigenvalues => &[Axis::G, Axis::DeltaB][..],
            Quantity::Dip => &[Axis::G, Axis::DeltaB][..],
            Quantity::Sensitivity => &[Axis::DeltaB][..],
            Quantity::Spectrum => &[Axis::Omega][..],
        };
        if !allowed.contains(&axis) {
            let names: Vec<&str> = allowed.iter().map(|a| a.name()).collect();
            return self.fail(
                "sweep.axis",
                format!("\"{}\" cannot drive quantity \"{}\"; use {}", axis.name(), quantity.name(), names.join(" or ")),
            );
        }
        Ok(SweepSpec {
            axis,
            quantity,
            start,
            stop,
            points: points as usize,
            scale,
        })
    }
}

/// Parameters of the system under study, in MHz.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    /// Identical spheres with κ_int fixed by κ₁ + κ₂ − κ_int = 2γ. A missing
    /// `g_mhz` means the EP3 coupling; a missing `delta_mhz` means the
    /// manifold detuning.
    Symmetric {
        gamma_mhz: f64,
        g_mhz: Option<f64>,
        delta_mhz: Option<f64>,
        kappa1_mhz: f64,
        kappa2_mhz: f64,
    },
    Full {
        kappa1_mhz: f64,
        kappa2_mhz: f64,
        kappa_int_mhz: f64,
        gamma1_mhz: f64,
        gamma2_mhz: f64,
        g1_mhz: f64,
        g2_mhz: f64,
        delta1_mhz: f64,
        delta2_mhz: f64,
    },
}

impl SystemSpec {
    pub fn is_full(&self) -> bool {
        matches!(self, SystemSpec::Full { .. })
    }

    /// The same system with the coupling replaced by `g_mhz`.
    pub fn with_g(&self, g_mhz: f64) -> SystemSpec {
        match self.clone() {
            SystemSpec::Symmetric {
                gamma_mhz,
                delta_mhz,
                kappa1_mhz,
                kappa2_mhz,
                ..
            } => SystemSpec::Symmetric {
                gamma_mhz,
                g_mhz: Some(g_mhz),
                delta_mhz,
                kappa1_mhz,
                kappa2_mhz,
            },
            SystemSpec::Full { .. } => {
                let mut s = self.clone();
                if let SystemSpec::Full { g1_mhz, g2_mhz, .. } = &mut s {
                    *g1_mhz = g_mhz;
                    *g2_mhz = g_mhz;
                }
                s
            }
        }
    }

    /// Symmetric parameters in rad/µs, if this is the symmetric form.
    pub fn symmetric(&self) -> ep3sense_core::Result<Option<SymmetricParams>> {
        let SystemSpec::Symmetric {
            gamma_mhz,
            g_mhz,
            delta_mhz,
            ..
        } = *self
        else {
            return Ok(None);
        };
        let gamma = mhz_to_rad(gamma_mhz);
        let sym = match (g_mhz, delta_mhz) {
            (None, None) => SymmetricParams::ep3(gamma)?,
            (None, Some(d)) => {
                let p = SymmetricParams::ep3(gamma)?;
                SymmetricParams::new(gamma, p.g, mhz_to_rad(d))?
            }
            (Some(g), None) => SymmetricParams::on_manifold(gamma, mhz_to_rad(g))?,
            (Some(g), Some(d)) => SymmetricParams::new(gamma, mhz_to_rad(g), mhz_to_rad(d))?,
        };
        Ok(Some(sym))
    }

    pub fn params(&self) -> ep3sense_core::Result<SystemParams> {
        match *self {
            SystemSpec::Symmetric {
                kappa1_mhz,
                kappa2_mhz,
                ..
            } => {
                let sym = self.symmetric()?.expect("symmetric form");
                SystemParams::from_symmetric(&sym, mhz_to_rad(kappa1_mhz), mhz_to_rad(kappa2_mhz))
            }
            SystemSpec::Full {
                kappa1_mhz,
                kappa2_mhz,
                kappa_int_mhz,
                gamma1_mhz,
                gamma2_mhz,
                g1_mhz,
                g2_mhz,
                delta1_mhz,
                delta2_mhz,
            } => {
                let p = SystemParams {
                    kappa1: mhz_to_rad(kappa1_mhz),
                    kappa2: mhz_to_rad(kappa2_mhz),
                    kappa_int: mhz_to_rad(kappa_int_mhz),
                    gamma1: mhz_to_rad(gamma1_mhz),
                    gamma2: mhz_to_rad(gamma2_mhz),
                    g1: mhz_to_rad(g1_mhz),
                    g2: mhz_to_rad(g2_mhz),
                    delta1: mhz_to_rad(delta1_mhz),
                    delta2: mhz_to_rad(delta2_mhz),
                    omega_c: 0.0,
                };
                p.validate()?;
                Ok(p)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSpec {
    Cpa,
    Manual { p: f64, phi_rad: f64 },
}

impl DriveSpec {
    pub fn resolve(&self, params: &SystemParams) -> ep3sense_core::Result<DriveParams> {
        match *self {
            DriveSpec::Cpa => cpa_drive(params),
            DriveSpec::Manual { p, phi_rad } => DriveParams::new(p, phi_rad),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    G,
    DeltaB,
    Omega,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::G => "g_mhz",
            Axis::DeltaB => "delta_b_mhz",
            Axis::Omega => "omega_mhz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Eigenvalues,
    Dip,
    Sensitivity,
    Spectrum,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Eigenvalues => "eigenvalues",
            Quantity::Dip => "dip",
            Quantity::Sensitivity => "sensitivity",
            Quantity::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub quantity: Quantity,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => ep3sense_core::spectrum::linear_grid(self.start, self.stop, self.points),
            Scale::Log => ep3sense_core::spectrum::linear_grid(self.start.log10(), self.stop.log10(), self.points)
                .into_iter()
                .map(|e| 10f64.powf(e))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// None writes to standard output.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub drive: DriveSpec,
    pub sweep: SweepSpec,
    pub output: OutputSpec,
    pub floor_db: f64,
}

impl RunConfig {
    /// Defaults, then the file at `path` if given, then `overrides`.
    pub fn load(path: Option<&Path>, overrides: Layer) -> Result<Self> {
        let mut layer = Layer::parse("default.toml", DEFAULT_CONFIG)?;
        if let Some(p) = path {
            layer = layer.merged(Layer::from_path(p)?);
        }
        layer.merged(overrides).resolve()
    }
}
