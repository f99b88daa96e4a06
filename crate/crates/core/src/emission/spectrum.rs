use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    first_order_bracket, prob_density_closed_form, prob_density_oracle, static_decay_probability, EmitterParams,
};
use crate::error::{ModelError, Result};
use crate::model::EffectiveMassModel;
use crate::numerics::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    #[default]
    ClosedForm,
    /// Direct quadrature of the amplitude integral.
    Oracle,
}

/// Emission probability density sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub t: f64,
    pub omega0: f64,
    pub omega_g: f64,
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Index of the largest value (first one on ties).
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, v) in self.values.iter().enumerate() {
            if best.is_none_or(|b| *v > self.values[b]) {
                best = Some(i);
            }
        }
        best
    }
}

/// `n` equally spaced points on `[lo, hi]`, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(ModelError::invalid("points", "grid must contain at least one point"));
    }
    if !lo.is_finite() || !hi.is_finite() || hi < lo || (n > 1 && hi == lo) {
        return Err(ModelError::invalid("range", format!("bad grid range [{lo}, {hi}]")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect())
}

/// 4001 points from just above the edge to `2 omega0`.
pub fn default_grid(model: &EffectiveMassModel, emitter: &EmitterParams) -> Result<Vec<f64>> {
    emitter.check_against(model)?;
    uniform_grid(model.omega_g + 1e-3 * emitter.omega0, 2.0 * emitter.omega0, 4001)
}

fn check_grid(model: &EffectiveMassModel, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(ModelError::invalid("grid", "empty frequency grid"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ModelError::invalid("grid", "frequencies must be strictly increasing"));
    }
    if !(grid[0] > model.omega_g) || !grid[grid.len() - 1].is_finite() {
        return Err(ModelError::invalid(
            "grid",
            format!("grid starts at {} which is not above the band edge {}", grid[0], model.omega_g),
        ));
    }
    Ok(())
}

/// Evaluates the emission spectrum at time `t` on `grid`, in parallel.
pub fn spectrum(
    model: &EffectiveMassModel,
    emitter: &EmitterParams,
    grid: &[f64],
    t: f64,
    method: SpectrumMethod,
) -> Result<Spectrum> {
    model.validate()?;
    emitter.check_against(model)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(ModelError::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    check_grid(model, grid)?;
    let values = grid
        .par_iter()
        .map(|&omega| match method {
            SpectrumMethod::ClosedForm => prob_density_closed_form(model, emitter, omega, t),
            SpectrumMethod::Oracle => prob_density_oracle(model, emitter, omega, t),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Spectrum { t, omega0: emitter.omega0, omega_g: model.omega_g, omegas: grid.to_vec(), values })
}

const TOTAL_TAIL_TOLERANCE: f64 = 1e-4;

/// Total emitted probability `int P(omega, t) d omega` of the closed-form
/// spectrum, integrated over `u = sqrt(omega - omega_g)` to remove the edge
/// divergence. The upper cutoff is chosen so that the neglected tail is
/// below `1e-4` of the static decay law.
pub fn total_probability(model: &EffectiveMassModel, emitter: &EmitterParams, t: f64) -> Result<f64> {
    model.validate()?;
    emitter.check_against(model)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(ModelError::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let w0 = emitter.omega0;
    let wg = model.omega_g;
    let z = if model.omega_c > 0.0 { (model.xi_bar / model.omega_c).abs() } else { 0.0 };

    // Beyond W >= max(2 w0, 2 wg, w0 + 2 wc) the integrand is bounded by
    // (N/pi) 4 sqrt2 (2 + 6z)^2 / omega^{7/2}.
    let reference = static_decay_probability(emitter, model, t)?;
    let coefficient = emitter.prefactor / PI * 4.0 * SQRT_2 * (2.0 + 6.0 * z).powi(2) / 2.5;
    let w_tail = (coefficient / (TOTAL_TAIL_TOLERANCE * reference)).powf(0.4);
    let upper = w_tail.max(2.0 * w0).max(2.0 * wg).max(w0 + 2.0 * model.omega_c);

    let u_max = (upper - wg).sqrt();
    let rule = GaussLegendre::new(8);
    // The phase (omega - w0 +- wc) t changes at rate 2 u t in u.
    let panels = rule.panels_for(u_max, 2.0 * u_max * t + 1.0, 20).max(16);
    let chunk = 64usize;
    let chunks = panels.div_ceil(chunk);
    let width = u_max / chunks as f64;
    let total: f64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = c as f64 * width;
            rule.integrate(a, a + width, chunk, |u| {
                let omega = wg + u * u;
                let bracket = first_order_bracket(model, omega - w0, t);
                2.0 * bracket.norm_sqr() / omega
            })
        })
        .sum();
    Ok(emitter.prefactor / PI * total)
}
