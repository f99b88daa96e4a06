//! Side-peak asymmetry as a function of the modulation frequency, and
//! recovery of the band-edge frequency from a measured asymmetry curve.
//!
//! Each sweep entry evaluates the closed-form spectrum on three narrow
//! windows around `omega0 - omega_c`, `omega0` and `omega0 + omega_c`, then
//! reads the sideband heights with [`find_peaks`]. The fit inverts the
//! long-time ratio `[(w0 + wc)/(w0 - wc)] sqrt((w0 + wc - wg)/(w0 - wc - wg))`
//! for `wg` by a coarse scan followed by golden-section refinement.

use std::f64::consts::TAU;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emission::{exact_ratio, find_peaks, spectrum, EmitterParams, SpectrumMethod};
use crate::error::{ModelError, Result};
use crate::model::EffectiveMassModel;
use crate::numerics::golden_section;

/// Default evaluation time; long enough that the sidebands are far narrower
/// than their separation from the central line.
pub const DEFAULT_SWEEP_TIME: f64 = 1.2e6;

/// Smallest resolvable modulation frequency, in units of `2 pi / t`.
pub const MIN_RESOLVED_CYCLES: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub t: f64,
    /// Half-width of each window in units of `2 pi / t`.
    pub window_lobes: f64,
    pub points_per_window: usize,
    /// Required clearance of `omega0 - omega_c` above the edge.
    pub edge_margin: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { t: DEFAULT_SWEEP_TIME, window_lobes: 3.0, points_per_window: 401, edge_margin: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Measured,
    /// `omega_c` below `20 * 2 pi / t`; the sidebands merge with the central line.
    Unresolved,
    /// The left sideband would sit inside the gap.
    InsideGap,
    /// A sideband could not be located.
    MissingPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub omega_c: f64,
    pub ratio: Option<f64>,
    pub predicted: Option<f64>,
    pub status: EntryStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub omega0: f64,
    pub t: f64,
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn omega_c_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.omega_c).collect()
    }

    pub fn ratios(&self) -> Vec<Option<f64>> {
        self.entries.iter().map(|e| e.ratio).collect()
    }

    /// `(omega_c, ratio)` for every measured entry.
    pub fn measured(&self) -> Vec<(f64, f64)> {
        self.entries.iter().filter_map(|e| e.ratio.map(|r| (e.omega_c, r))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapFit {
    pub omega_g: f64,
    /// Root-mean-square ratio residual at the optimum.
    pub residual_rms: f64,
    pub iterations: usize,
    pub points_used: usize,
}

fn window_grid(center: f64, half_width: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 * half_width / (n - 1) as f64;
    (0..n).map(move |i| center - half_width + step * i as f64)
}

fn measure_entry(
    base: &EffectiveMassModel,
    emitter: &EmitterParams,
    omega_c: f64,
    opts: &SweepOptions,
) -> Result<SweepEntry> {
    let unresolved = SweepEntry { omega_c, ratio: None, predicted: None, status: EntryStatus::Unresolved };
    if !(omega_c >= MIN_RESOLVED_CYCLES * TAU / opts.t) {
        return Ok(unresolved);
    }
    if emitter.omega0 - omega_c <= base.omega_g + opts.edge_margin {
        return Ok(SweepEntry { status: EntryStatus::InsideGap, ..unresolved });
    }
    let model = base.with_modulation(base.xi_bar, omega_c)?;
    let predicted = Some(exact_ratio(emitter.omega0, omega_c, model.omega_g));
    let half = opts.window_lobes * TAU / opts.t;
    let n = opts.points_per_window.max(3);
    let grid: Vec<f64> = [emitter.omega0 - omega_c, emitter.omega0, emitter.omega0 + omega_c]
        .into_iter()
        .flat_map(|c| window_grid(c, half, n))
        .collect();
    let spec = spectrum(&model, emitter, &grid, opts.t, SpectrumMethod::ClosedForm)?;
    let report = find_peaks(&spec, omega_c)?;
    Ok(match report.ratio_measured {
        Some(r) => SweepEntry { omega_c, ratio: Some(r), predicted, status: EntryStatus::Measured },
        None => SweepEntry { omega_c, ratio: None, predicted, status: EntryStatus::MissingPeak },
    })
}

/// Measures the sideband ratio for every modulation frequency in
/// `omega_cs`. `base` supplies the edge, curvature and modulation depth; its
/// own `omega_c` is ignored.
pub fn run_sweep(
    base: &EffectiveMassModel,
    emitter: &EmitterParams,
    omega_cs: &[f64],
    opts: &SweepOptions,
) -> Result<SweepResult> {
    base.validate()?;
    emitter.check_against(base)?;
    if omega_cs.is_empty() {
        return Err(ModelError::invalid("omega_c", "sweep needs at least one modulation frequency"));
    }
    if !(opts.t > 0.0) || !opts.t.is_finite() {
        return Err(ModelError::invalid("t", format!("must be positive, got {}", opts.t)));
    }
    if !(opts.window_lobes > 0.0) {
        return Err(ModelError::invalid("window_lobes", "must be positive"));
    }
    if let Some(bad) = omega_cs.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(ModelError::invalid("omega_c", format!("must be finite and >= 0, got {bad}")));
    }
    let entries = omega_cs.par_iter().map(|&wc| measure_entry(base, emitter, wc, opts)).collect::<Result<Vec<_>>>()?;
    for e in &entries {
        debug!("omega_c = {}: {:?} ratio {:?}", e.omega_c, e.status, e.ratio);
    }
    Ok(SweepResult { omega0: emitter.omega0, t: opts.t, entries })
}

/// Multiplies every measured ratio by `1 + sigma * N(0, 1)`, reproducibly
/// from `seed`.
pub fn perturb_ratios(sweep: &SweepResult, relative_sigma: f64, seed: u64) -> Result<SweepResult> {
    if !(relative_sigma >= 0.0) {
        return Err(ModelError::invalid("noise", format!("bad relative noise level {relative_sigma}")));
    }
    let normal = Normal::new(0.0, relative_sigma)
        .map_err(|_| ModelError::invalid("noise", format!("bad relative noise level {relative_sigma}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = sweep.clone();
    for e in out.entries.iter_mut() {
        if let Some(r) = e.ratio.as_mut() {
            *r *= 1.0 + normal.sample(&mut rng);
        }
    }
    Ok(out)
}

/// Sum of squared residuals between measured ratios and the long-time model
/// with edge `omega_g`.
pub fn fit_objective(sweep: &SweepResult, omega_g: f64) -> f64 {
    sweep.measured().iter().map(|&(wc, r)| (exact_ratio(sweep.omega0, wc, omega_g) - r).powi(2)).sum()
}

const FIT_SCAN_POINTS: usize = 400;
const FIT_MAX_ITER: usize = 200;

/// Least-squares estimate of the band-edge frequency from the measured
/// ratios. Needs at least three measured entries.
pub fn fit_gap_edge(sweep: &SweepResult) -> Result<GapFit> {
    let points = sweep.measured();
    if points.len() < 3 {
        return Err(ModelError::Domain(format!("gap fit needs at least 3 measured ratios, have {}", points.len())));
    }
    let w0 = sweep.omega0;
    let max_wc = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let upper = (w0 - max_wc) * (1.0 - 1e-9);
    if !(upper > 0.0) {
        return Err(ModelError::Domain("no admissible band edge below the left sidebands".into()));
    }
    let objective = |wg: f64| fit_objective(sweep, wg);
    let step = upper / FIT_SCAN_POINTS as f64;
    let best = (1..FIT_SCAN_POINTS)
        .map(|i| i as f64 * step)
        .min_by(|a, b| objective(*a).total_cmp(&objective(*b)))
        .unwrap_or(0.5 * upper);
    let lo = (best - step).max(0.0);
    let hi = (best + step).min(upper);
    let min = golden_section(objective, lo, hi, 1e-12 * w0, FIT_MAX_ITER)?;
    Ok(GapFit {
        omega_g: min.x,
        residual_rms: (min.value / points.len() as f64).sqrt(),
        iterations: min.iterations,
        points_used: points.len(),
    })
}
