//! First-order spontaneous emission of a two-level emitter coupled to the
//! modulated band-edge continuum.
//!
//! The emission amplitude into a mode of frequency `omega` is the time
//! integral
//!
//! ```text
//! I(omega, t) = int_0^t dt' omega_k(t')^(-1/2) exp(i (omega - omega0) t') exp(i phi(t'))
//! ```
//!
//! with the adiabatic phase `phi(t) = xi_bar (1 - cos(omega_c t)) / omega_c`.
//! [`amplitude_integral_numeric`] evaluates it by quadrature;
//! [`amplitude_first_order`] is the analytic result to first order in
//! `xi_bar / omega_c` for `omega_c << omega`. The probability density per
//! unit frequency is `(N / pi) (omega - omega_g)^(-1/2) |.|^2`, where the
//! `1/pi` comes from the continuum limit of the mode sum and `N` absorbs the
//! remaining constants.

mod peaks;
mod spectrum;

use std::f64::consts::PI;
use std::sync::OnceLock;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::EffectiveMassModel;
use crate::numerics::GaussLegendre;

pub use peaks::{dominant_maxima, find_peaks, full_width_half_max, Peak, PeakReport};
pub use spectrum::{default_grid, spectrum, total_probability, uniform_grid, Spectrum, SpectrumMethod};

/// Quadrature nodes placed on every period of the fastest oscillation.
pub const ORACLE_NODES_PER_PERIOD: usize = 20;

const ORACLE_ORDER: usize = 8;

fn oracle_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(ORACLE_ORDER))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    /// Transition frequency.
    pub omega0: f64,
    /// Overall normalization of the emission density.
    pub prefactor: f64,
}

impl EmitterParams {
    pub fn new(omega0: f64, prefactor: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(ModelError::invalid("omega0", format!("must be positive, got {omega0}")));
        }
        if !(prefactor > 0.0) || !prefactor.is_finite() {
            return Err(ModelError::invalid("prefactor", format!("must be positive, got {prefactor}")));
        }
        Ok(Self { omega0, prefactor })
    }

    /// `omega0 = 1`, `N = 1`.
    pub fn unit() -> Self {
        Self { omega0: 1.0, prefactor: 1.0 }
    }

    /// The emitter must sit above the band edge.
    pub fn check_against(&self, model: &EffectiveMassModel) -> Result<()> {
        if self.omega0 <= model.omega_g {
            return Err(ModelError::invalid(
                "omega0",
                format!("emitter at {} lies inside the gap (edge {})", self.omega0, model.omega_g),
            ));
        }
        Ok(())
    }
}

/// `phi(t) = int_0^t xi_bar sin(omega_c t') dt'`.
pub fn adiabatic_phase(model: &EffectiveMassModel, t: f64) -> f64 {
    if model.omega_c == 0.0 {
        return 0.0;
    }
    model.xi_bar * (1.0 - (model.omega_c * t).cos()) / model.omega_c
}

/// `sin(x t / 2) / x`, continued to `t / 2` at `x = 0`.
pub fn half_sinc(x: f64, t: f64) -> f64 {
    let y = 0.5 * x * t;
    if y.abs() < 1e-4 {
        0.5 * t * (1.0 - y * y / 6.0)
    } else {
        y.sin() / x
    }
}

fn check_mode(model: &EffectiveMassModel, omega: f64) -> Result<()> {
    if !(omega > model.omega_g) {
        return Err(ModelError::Domain(format!("omega = {omega} is not above the band edge {}", model.omega_g)));
    }
    Ok(())
}

/// Squared-modulus kernel `|T0 + i z [T0 - e^{i w t/2} T+ - e^{-i w t/2} T-]|^2`
/// with `z = xi_bar / omega_c`, `T0 = 2 sin(d t/2)/d`, `T+- = sin((d +- w) t/2)/(d +- w)`,
/// `d = omega - omega0`.
fn first_order_bracket(model: &EffectiveMassModel, detuning: f64, t: f64) -> Complex64 {
    let t0 = 2.0 * half_sinc(detuning, t);
    if model.omega_c == 0.0 || model.xi_bar == 0.0 {
        return Complex64::new(t0, 0.0);
    }
    let wc = model.omega_c;
    let z = model.xi_bar / wc;
    let tp = half_sinc(detuning + wc, t);
    let tm = half_sinc(detuning - wc, t);
    let rot = Complex64::from_polar(1.0, 0.5 * wc * t);
    let side = Complex64::new(t0, 0.0) - rot * tp - rot.conj() * tm;
    Complex64::new(t0, 0.0) + Complex64::new(0.0, z) * side
}

/// First-order closed form of the emission amplitude
/// `omega^(-1/2) e^{i d t/2} [T0 + i z (T0 - e^{i w t/2} T+ - e^{-i w t/2} T-)]`.
pub fn amplitude_first_order(
    model: &EffectiveMassModel,
    emitter: &EmitterParams,
    omega: f64,
    t: f64,
) -> Result<Complex64> {
    check_mode(model, omega)?;
    let d = omega - emitter.omega0;
    Ok(Complex64::from_polar(omega.powf(-0.5), 0.5 * d * t) * first_order_bracket(model, d, t))
}

/// Emission probability per unit frequency at time `t`, closed form.
pub fn prob_density_closed_form(
    model: &EffectiveMassModel,
    emitter: &EmitterParams,
    omega: f64,
    t: f64,
) -> Result<f64> {
    check_mode(model, omega)?;
    let bracket = first_order_bracket(model, omega - emitter.omega0, t);
    Ok(emitter.prefactor / PI * bracket.norm_sqr() / ((omega - model.omega_g).sqrt() * omega))
}

/// Emission amplitude by composite Gauss-Legendre quadrature of the full
/// integrand, with `omega_k(t') = omega + xi_bar sin(omega_c t')` in the
/// amplitude factor and the exact adiabatic phase. No expansion in `xi_bar`.
pub fn amplitude_integral_numeric(
    model: &EffectiveMassModel,
    emitter: &EmitterParams,
    omega: f64,
    t: f64,
) -> Result<Complex64> {
    if t < 0.0 {
        return Err(ModelError::Domain(format!("time must be >= 0, got {t}")));
    }
    check_mode(model, omega)?;
    if omega - model.xi_bar.abs() <= 0.0 {
        return Err(ModelError::Domain(format!("mode frequency {omega} crosses zero under modulation")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = omega - emitter.omega0;
    let (xb, wc) = (model.xi_bar, model.omega_c);
    let rule = oracle_rule();
    let fastest = d.abs() + wc + xb.abs();
    let panels = rule.panels_for(t, fastest, ORACLE_NODES_PER_PERIOD).max(4);
    let amp = rule.integrate_complex(0.0, t, panels, |s| {
        let (sin_c, cos_c) = if wc == 0.0 { (0.0, 1.0) } else { (wc * s).sin_cos() };
        let phi = if wc == 0.0 { 0.0 } else { xb * (1.0 - cos_c) / wc };
        Complex64::from_polar((omega + xb * sin_c).powf(-0.5), d * s + phi)
    });
    Ok(amp)
}

/// Emission probability per unit frequency from the quadrature amplitude.
pub fn prob_density_oracle(model: &EffectiveMassModel, emitter: &EmitterParams, omega: f64, t: f64) -> Result<f64> {
    let amp = amplitude_integral_numeric(model, emitter, omega, t)?;
    Ok(emitter.prefactor / PI * amp.norm_sqr() / (omega - model.omega_g).sqrt())
}

/// Long-time static decay law `P(t) = 2 N t / (omega0 sqrt(omega0 - omega_g))`.
pub fn static_decay_probability(emitter: &EmitterParams, model: &EffectiveMassModel, t: f64) -> Result<f64> {
    emitter.check_against(model)?;
    let w0 = emitter.omega0;
    Ok(2.0 * emitter.prefactor * t / (w0 * (w0 - model.omega_g).sqrt()))
}

fn check_side_peaks(model: &EffectiveMassModel, emitter: &EmitterParams) -> Result<()> {
    emitter.check_against(model)?;
    if emitter.omega0 - model.omega_c <= model.omega_g {
        return Err(ModelError::Domain(format!(
            "left side peak at {} falls inside the gap (edge {})",
            emitter.omega0 - model.omega_c,
            model.omega_g
        )));
    }
    Ok(())
}

/// Side-peak height ratio predicted by the density of states alone,
/// `rho(omega0 - omega_c) / rho(omega0 + omega_c)`.
pub fn peak_ratio_closed(model: &EffectiveMassModel, emitter: &EmitterParams) -> Result<f64> {
    check_side_peaks(model, emitter)?;
    let (w0, wc, wg) = (emitter.omega0, model.omega_c, model.omega_g);
    Ok(((w0 + wc - wg) / (w0 - wc - wg)).sqrt())
}

/// Side-peak ratio including the `1/omega` factor of the emission density;
/// the long-time limit of the closed-form quotient.
pub fn peak_ratio_exact(model: &EffectiveMassModel, emitter: &EmitterParams) -> Result<f64> {
    check_side_peaks(model, emitter)?;
    Ok(exact_ratio(emitter.omega0, model.omega_c, model.omega_g))
}

/// `[(w0 + wc) / (w0 - wc)] sqrt((w0 + wc - wg) / (w0 - wc - wg))`.
pub fn exact_ratio(omega0: f64, omega_c: f64, omega_g: f64) -> f64 {
    (omega0 + omega_c) / (omega0 - omega_c) * ((omega0 + omega_c - omega_g) / (omega0 - omega_c - omega_g)).sqrt()
}

/// Whether the emitter sits more than `margin` linewidth scales above the
/// band edge. `linewidth_scale` is supplied by the caller in the same units
/// as the frequencies.
pub fn check_weak_coupling(
    emitter: &EmitterParams,
    model: &EffectiveMassModel,
    linewidth_scale: f64,
    margin: f64,
) -> Result<bool> {
    if !(margin > 1.0) {
        return Err(ModelError::invalid("margin", format!("must exceed 1, got {margin}")));
    }
    if !(linewidth_scale >= 0.0) {
        return Err(ModelError::invalid("linewidth_scale", "must be >= 0"));
    }
    let separation = emitter.omega0 - model.omega_g;
    let ok = separation > margin * linewidth_scale;
    if !ok {
        warn!(
            "emitter only {separation} above the band edge (linewidth scale {linewidth_scale}, margin {margin}); \
             first-order emission is unreliable"
        );
    }
    Ok(ok)
}
