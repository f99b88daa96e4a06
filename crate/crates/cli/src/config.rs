//! Run configuration: defaults, flat `key = value` config files and
//! command-line overrides.
//!
//! Layering is defaults, then the config file, then flags. Each layer is
//! merged into the JSON form of the configuration one key at a time so that
//! a bad value is reported against the key that carried it.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use modgap::crystal::ModulationKind;
use modgap::dos::DosShape;
use modgap::emission::SpectrumMethod;
use modgap::sweep::DEFAULT_SWEEP_TIME;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Dispersion,
    Dos,
    Spectrum,
    Decay,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// Band-edge parameters given directly (`omega_g`, `a_coef`, `k0`, ...).
    #[default]
    Effective,
    /// Band edge derived from the slab crystal (`n0`, `lattice_a`, `modulation`, ...).
    Crystal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    None,
    RefractiveIndex,
    LatticeConstant,
}

impl From<Modulation> for ModulationKind {
    fn from(m: Modulation) -> Self {
        match m {
            Modulation::None => ModulationKind::None,
            Modulation::RefractiveIndex => ModulationKind::RefractiveIndex,
            Modulation::LatticeConstant => ModulationKind::LatticeConstant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl From<Method> for SpectrumMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::ClosedForm => SpectrumMethod::ClosedForm,
            Method::Oracle => SpectrumMethod::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Isotropic3d,
    Waveguide1d,
}

impl From<Shape> for DosShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Isotropic3d => DosShape::Isotropic3d,
            Shape::Waveguide1d => DosShape::Waveguide1d,
        }
    }
}

/// Fully resolved configuration of one run. Frequencies are in units of
/// `omega0`, times in units of `1/omega0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub model_source: ModelSource,
    pub omega_g: f64,
    pub a_coef: f64,
    pub k0: f64,
    pub xi_bar: f64,
    pub omega_c: f64,
    pub xi_prime: f64,
    pub n0: f64,
    pub lattice_a: f64,
    pub modulation: Modulation,
    pub amplitude: f64,
    pub include_curvature: bool,
    pub omega0: f64,
    pub prefactor: f64,
    pub t: f64,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub points: u64,
    pub k_points: u64,
    pub bands: u32,
    pub t_max: f64,
    pub t_points: u64,
    pub omega_c_min: f64,
    pub omega_c_max: f64,
    pub omega_c_points: u64,
    pub noise: f64,
    pub seed: u64,
    pub method: Method,
    pub dos_shape: Shape,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults reproduce the three-peak spectrum: `omega_g = 0.5`,
    /// `xi_bar = 0.01`, `omega_c = 0.1`, `t = 1200`.
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            model_source: ModelSource::Effective,
            omega_g: 0.5,
            a_coef: 1.0,
            k0: 1.0,
            xi_bar: 0.01,
            omega_c: 0.1,
            xi_prime: 0.0,
            n0: 2.0,
            lattice_a: 1.0,
            modulation: Modulation::RefractiveIndex,
            amplitude: 0.01,
            include_curvature: true,
            omega0: 1.0,
            prefactor: 1.0,
            t: if command == Command::Sweep { DEFAULT_SWEEP_TIME } else { 1200.0 },
            omega_min: None,
            omega_max: None,
            points: 4001,
            k_points: 401,
            bands: 2,
            t_max: 2000.0,
            t_points: 201,
            omega_c_min: 0.05,
            omega_c_max: 0.2,
            omega_c_points: 10,
            noise: 0.0,
            seed: 0,
            method: Method::ClosedForm,
            dos_shape: Shape::Isotropic3d,
            format: None,
            out: None,
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

/// Command-line overrides; every flag mirrors a config-file key.
#[derive(Debug, Clone, Default, Serialize, Args)]
pub struct Overrides {
    /// Flat `key = value` file with defaults for any of the options below.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Where the band edge comes from.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_source: Option<ModelSource>,
    /// Static band-edge frequency (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_g: Option<f64>,
    /// Band curvature A in omega = omega_g + A (k - k0)^2.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_coef: Option<f64>,
    /// Band-edge wavenumber.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    /// Edge oscillation amplitude (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_bar: Option<f64>,
    /// Modulation frequency (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    /// Relative curvature modulation depth (dimensionless).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_prime: Option<f64>,
    /// Slab refractive index (crystal source and dispersion).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    /// Slab thickness a; the gap is b = 2 n0 a (units of c/omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_a: Option<f64>,
    /// Crystal modulation kind.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulation: Option<Modulation>,
    /// Relative crystal modulation amplitude (xi or eta).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Keep the curvature oscillation of lattice modulation.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_curvature: Option<bool>,
    /// Emitter transition frequency.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Overall normalization N of the emission density.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefactor: Option<f64>,
    /// Evaluation time (units of 1/omega0); sweeps default to 1.2e6.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Lower end of the frequency grid (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    /// Upper end of the frequency grid (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    /// Number of frequency grid points.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<u64>,
    /// Number of wavenumber samples for dispersion.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_points: Option<u64>,
    /// Number of bands for dispersion.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bands: Option<u32>,
    /// Final time of the decay curve (units of 1/omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Number of decay-curve samples.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_points: Option<u64>,
    /// Smallest swept modulation frequency (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c_min: Option<f64>,
    /// Largest swept modulation frequency (units of omega0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c_max: Option<f64>,
    /// Number of swept modulation frequencies.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c_points: Option<u64>,
    /// Relative Gaussian noise applied to measured ratios.
    #[arg(long, global = true, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// Seed of the ratio noise.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Spectrum evaluation method.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Shorthand for `--method oracle`.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub oracle: bool,
    /// Density-of-states geometry.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dos_shape: Option<Shape>,
    /// Output format; inferred from the `--out` extension when omitted.
    #[arg(long, global = true, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Parses a flat `key = value` file. `#` starts a comment; blank lines are
/// skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`, got `{line}`", n + 1)))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn typed_value(key: &str, current: &Value, text: &str) -> Result<Value, CliError> {
    let bad = |what: &str| CliError::config(key, format!("expected {what}, got `{text}`"));
    let float =
        || text.parse::<f64>().ok().filter(|x| x.is_finite()).map(Value::from).ok_or_else(|| bad("a finite number"));
    match current {
        Value::Bool(_) => text.parse::<bool>().map(Value::from).map_err(|_| bad("true or false")),
        Value::Number(n) if n.is_u64() => {
            text.parse::<u64>().map(Value::from).map_err(|_| bad("a non-negative integer"))
        }
        Value::Number(_) => float(),
        Value::Null if matches!(key, "omega_min" | "omega_max") => float(),
        Value::String(_) | Value::Null => {
            let word = text.trim_matches('"');
            // Enum values are accepted in the flag spelling too.
            Ok(Value::from(if key == "out" { word.to_string() } else { word.replace('-', "_") }))
        }
        _ => Err(bad("a scalar")),
    }
}

fn check(key: &str, merged: &Value) -> Result<(), CliError> {
    serde_json::from_value::<RunConfig>(merged.clone()).map(|_| ()).map_err(|e| CliError::config(key, e.to_string()))
}

/// Applies config-file pairs to `base`, rejecting unknown keys and values
/// that do not fit the key's type.
pub fn apply_pairs(base: RunConfig, pairs: &[(String, String)]) -> Result<RunConfig, CliError> {
    let mut merged = serde_json::to_value(&base).expect("config serializes");
    for (key, text) in pairs {
        if key == "command" {
            return Err(CliError::config(key, "the command is chosen on the command line"));
        }
        let obj = merged.as_object_mut().expect("config is an object");
        let current = obj.get(key).ok_or_else(|| CliError::config(key, "unknown key"))?.clone();
        obj.insert(key.clone(), typed_value(key, &current, text)?);
        check(key, &merged)?;
    }
    Ok(serde_json::from_value(merged).expect("checked above"))
}

/// Applies command-line overrides on top of `base`.
pub fn apply_overrides(base: RunConfig, flags: &Overrides) -> Result<RunConfig, CliError> {
    let mut merged = serde_json::to_value(&base).expect("config serializes");
    let Value::Object(over) = serde_json::to_value(flags).expect("flags serialize") else {
        unreachable!("flags serialize to an object")
    };
    let obj: &mut Map<String, Value> = merged.as_object_mut().expect("config is an object");
    for (key, value) in over {
        obj.insert(key.clone(), value);
    }
    let mut cfg: RunConfig = serde_json::from_value(merged).map_err(|e| CliError::Usage(e.to_string()))?;
    if flags.oracle {
        cfg.method = Method::Oracle;
    }
    Ok(cfg)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
}

/// Builds, resolves and validates the configuration for `command`.
pub fn build_config(command: Command, flags: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = &flags.config {
        cfg = apply_pairs(cfg, &read_config_file(path)?)?;
    }
    cfg = apply_overrides(cfg, flags)?;
    resolve(&mut cfg);
    validate(&cfg)?;
    Ok(cfg)
}

/// Fills grid bounds and the output format from the other settings.
pub fn resolve(cfg: &mut RunConfig) {
    if cfg.format.is_none() {
        let json = cfg.out.as_ref().and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("json"));
        cfg.format = Some(if json { Format::Json } else { Format::Csv });
    }
    if cfg.command == Command::Dispersion {
        return;
    }
    if cfg.omega_min.is_none() && cfg.model_source == ModelSource::Effective {
        let offset = match cfg.command {
            Command::Dos => modgap::dos::DEFAULT_EDGE_EPSILON * cfg.omega0,
            _ => 1e-3 * cfg.omega0,
        };
        cfg.omega_min = Some(cfg.omega_g + offset);
    }
    if cfg.omega_max.is_none() {
        cfg.omega_max = Some(2.0 * cfg.omega0);
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be positive, got {v}")))
    }
}

/// Checks cross-field constraints that the core types cannot see.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    positive("omega0", cfg.omega0)?;
    positive("prefactor", cfg.prefactor)?;
    if !(cfg.t >= 0.0) || !cfg.t.is_finite() {
        return Err(CliError::config("t", format!("must be finite and >= 0, got {}", cfg.t)));
    }
    if cfg.model_source == ModelSource::Effective && cfg.command != Command::Dispersion && cfg.omega0 <= cfg.omega_g {
        return Err(CliError::config(
            "omega_g",
            format!("emitter inside the gap: omega0 = {} must exceed omega_g = {}", cfg.omega0, cfg.omega_g),
        ));
    }
    match cfg.command {
        Command::Dispersion => {
            if cfg.k_points == 0 {
                return Err(CliError::config("k_points", "empty wavenumber grid"));
            }
            if cfg.bands == 0 {
                return Err(CliError::config("bands", "need at least one band"));
            }
        }
        Command::Dos | Command::Spectrum => {
            if cfg.points == 0 {
                return Err(CliError::config("points", "empty frequency grid"));
            }
            if let (Some(lo), Some(hi)) = (cfg.omega_min, cfg.omega_max) {
                if !(hi > lo) && cfg.points > 1 {
                    return Err(CliError::config("omega_max", format!("must exceed omega_min = {lo}")));
                }
            }
        }
        Command::Decay => {
            if cfg.t_points == 0 {
                return Err(CliError::config("t_points", "empty time grid"));
            }
            positive("t_max", cfg.t_max)?;
        }
        Command::Sweep => {
            if cfg.omega_c_points == 0 {
                return Err(CliError::config("omega_c_points", "empty modulation-frequency grid"));
            }
            positive("omega_c_min", cfg.omega_c_min)?;
            if cfg.omega_c_max < cfg.omega_c_min {
                return Err(CliError::config("omega_c_max", "must not be below omega_c_min"));
            }
            if !(cfg.noise >= 0.0) {
                return Err(CliError::config("noise", "must be >= 0"));
            }
            positive("t", cfg.t)?;
        }
    }
    Ok(())
}
