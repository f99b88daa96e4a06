use std::f64::consts::PI;
use std::fs;
use std::io::Write;

use log::info;
use modgap::crystal::{
    band_frequency, extended_zone_band, lattice_modulation_model, refractive_index_model, CrystalParams, ModulationSpec,
};
use modgap::dos::sample;
use modgap::emission::{find_peaks, spectrum, total_probability, uniform_grid, EmitterParams};
use modgap::sweep::{fit_gap_edge, perturb_ratios, run_sweep, SweepOptions};
use modgap::EffectiveMassModel;
use serde_json::{Map, Value};

use crate::config::{Command, Format, ModelSource, Modulation, RunConfig};
use crate::error::CliError;

/// Two-column result table with optional trailing comment lines and extra
/// JSON members.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: [&'static str; 2],
    pub rows: Vec<[f64; 2]>,
    pub footer: Vec<(String, Option<f64>)>,
    pub extra: Map<String, Value>,
}

impl Table {
    fn new(columns: [&'static str; 2], rows: Vec<[f64; 2]>) -> Self {
        Self { columns, rows, footer: Vec::new(), extra: Map::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{},{}\n", self.columns[0], self.columns[1]);
        for [a, b] in &self.rows {
            s.push_str(&format!("{a:.16e},{b:.16e}\n"));
        }
        for (name, value) in &self.footer {
            match value {
                Some(v) => s.push_str(&format!("# {name} = {v:.16e}\n")),
                None => s.push_str(&format!("# {name} = NaN\n")),
            }
        }
        s
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let mut obj = Map::new();
        obj.insert("meta".into(), serde_json::to_value(cfg).expect("config serializes"));
        for (i, name) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self.rows.iter().map(|r| number(r[i])).collect();
            obj.insert((*name).into(), Value::Array(col));
        }
        for (name, value) in &self.footer {
            obj.insert(name.clone(), value.map_or(Value::Null, number));
        }
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serializes");
        text.push('\n');
        text
    }
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn crystal(cfg: &RunConfig) -> Result<CrystalParams, CliError> {
    let amplitude = if cfg.modulation == Modulation::None { 0.0 } else { cfg.amplitude };
    let spec = ModulationSpec::new(cfg.modulation.into(), amplitude, cfg.omega_c)?;
    Ok(CrystalParams::matched(cfg.n0, cfg.lattice_a, spec)?)
}

/// The band-edge model the emission commands run on.
pub fn build_model(cfg: &RunConfig) -> Result<EffectiveMassModel, CliError> {
    match cfg.model_source {
        ModelSource::Effective => Ok(EffectiveMassModel::new(cfg.omega_g, cfg.a_coef, cfg.k0)?
            .with_modulation(cfg.xi_bar, cfg.omega_c)?
            .with_curvature_modulation(cfg.xi_prime)?),
        ModelSource::Crystal => {
            let params = crystal(cfg)?;
            let model = match cfg.modulation {
                Modulation::None | Modulation::RefractiveIndex => refractive_index_model(&params)?,
                Modulation::LatticeConstant => lattice_modulation_model(&params, cfg.include_curvature)?,
            };
            info!("crystal band edge omega_g = {}, A = {}, xi_bar = {}", model.omega_g, model.a_coef, model.xi_bar);
            Ok(model)
        }
    }
}

fn emitter(cfg: &RunConfig, model: &EffectiveMassModel) -> Result<EmitterParams, CliError> {
    let e = EmitterParams::new(cfg.omega0, cfg.prefactor)?;
    if cfg.omega0 <= model.omega_g {
        return Err(CliError::config(
            "omega0",
            format!("emitter inside the gap: omega0 = {} must exceed omega_g = {}", cfg.omega0, model.omega_g),
        ));
    }
    Ok(e)
}

fn frequency_grid(cfg: &RunConfig, model: &EffectiveMassModel) -> Result<Vec<f64>, CliError> {
    let lo = cfg.omega_min.unwrap_or(model.omega_g + 1e-3 * cfg.omega0);
    let hi = cfg.omega_max.unwrap_or(2.0 * cfg.omega0);
    uniform_grid(lo, hi, cfg.points as usize).map_err(|e| CliError::config("points", e.to_string()))
}

fn dispersion(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = crystal(cfg)?;
    let k_max = cfg.bands as f64 * PI / params.period();
    let ks =
        uniform_grid(0.0, k_max, cfg.k_points as usize).map_err(|e| CliError::config("k_points", e.to_string()))?;
    let rows = ks
        .iter()
        .map(|&k| {
            let band = extended_zone_band(&params, k).min(cfg.bands);
            band_frequency(&params, k, band, cfg.t).map(|w| [k, w])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table::new(["k", "omega"], rows))
}

fn dos(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = build_model(cfg)?;
    let grid = frequency_grid(cfg, &model)?;
    let rows = sample(&model, &grid, cfg.t, cfg.dos_shape.into())?.iter().map(|s| [s.omega, s.rho]).collect();
    Ok(Table::new(["omega", "value"], rows))
}

fn emission_spectrum(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = build_model(cfg)?;
    let em = emitter(cfg, &model)?;
    let grid = frequency_grid(cfg, &model)?;
    let s = spectrum(&model, &em, &grid, cfg.t, cfg.method.into())?;
    if s.len() >= 3 {
        if let Ok(p) = find_peaks(&s, model.omega_c) {
            info!(
                "central {:.6}, left {:?}, right {:?}, ratio {:?}",
                p.central.omega,
                p.left.map(|x| x.omega),
                p.right.map(|x| x.omega),
                p.ratio_measured
            );
        }
    }
    let rows = s.omegas.iter().zip(&s.values).map(|(&w, &v)| [w, v]).collect();
    Ok(Table::new(["omega", "value"], rows))
}

fn decay(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = build_model(cfg)?;
    let em = emitter(cfg, &model)?;
    let ts =
        uniform_grid(0.0, cfg.t_max, cfg.t_points as usize).map_err(|e| CliError::config("t_points", e.to_string()))?;
    let rows = ts.iter().map(|&t| total_probability(&model, &em, t).map(|p| [t, p])).collect::<Result<Vec<_>, _>>()?;
    Ok(Table::new(["t", "probability"], rows))
}

fn sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = build_model(cfg)?;
    let em = emitter(cfg, &model)?;
    let grid = uniform_grid(cfg.omega_c_min, cfg.omega_c_max, cfg.omega_c_points as usize)
        .map_err(|e| CliError::config("omega_c_points", e.to_string()))?;
    let opts = SweepOptions { t: cfg.t, ..SweepOptions::default() };
    let mut result = run_sweep(&model, &em, &grid, &opts)?;
    if cfg.noise > 0.0 {
        result = perturb_ratios(&result, cfg.noise, cfg.seed)?;
    }
    let fit = fit_gap_edge(&result).ok();
    let rows = result.entries.iter().map(|e| [e.omega_c, e.ratio.unwrap_or(f64::NAN)]).collect();
    let mut table = Table::new(["omega_c", "ratio"], rows);
    table.footer.push(("fitted_omega_g".into(), fit.map(|f| f.omega_g)));
    table.footer.push(("fit_residual".into(), fit.map(|f| f.residual_rms)));
    let status: Vec<Value> =
        result.entries.iter().map(|e| serde_json::to_value(e.status).expect("status serializes")).collect();
    table.extra.insert("status".into(), Value::Array(status));
    Ok(table)
}

/// Runs the configured command and returns its result table.
pub fn execute(cfg: &RunConfig) -> Result<Table, CliError> {
    match cfg.command {
        Command::Dispersion => dispersion(cfg),
        Command::Dos => dos(cfg),
        Command::Spectrum => emission_spectrum(cfg),
        Command::Decay => decay(cfg),
        Command::Sweep => sweep(cfg),
    }
}

/// Renders `table` in the configured format and writes it to the output
/// file or standard output.
pub fn write_output(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    let text = match cfg.format() {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(cfg),
    };
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
        }
    }
}
