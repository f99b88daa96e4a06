//! One-dimensional photonic crystal of dielectric slabs (thickness `2a`,
//! refractive index `n`) separated by vacuum gaps of width `b`, with period
//! `L = 2a + b`, and its adiabatically modulated variants.
//!
//! For `b = 2 n0 a` (equal optical path in slab and gap) the implicit
//! dispersion relation can be inverted in closed form; this "matched"
//! geometry is required by every closed-form routine here. Units: `c = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::EffectiveMassModel;
use crate::numerics::{bisect, golden_section};

/// Upper bound on modulation amplitudes; all expansions are first order.
pub const MAX_MODULATION_AMPLITUDE: f64 = 0.1;

/// Bisection tolerance for band-edge frequencies.
pub const EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationKind {
    None,
    /// `n(t) = n0 [1 + xi sin(omega_c t)]`.
    RefractiveIndex,
    /// `a(t), b(t), L(t)` all scaled by `[1 + eta sin(omega_c t)]`.
    LatticeConstant,
    /// Coupled-cavity hopping `J(t) = J [1 + amplitude sin(omega_c t)]`.
    TightBindingHopping,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationSpec {
    kind: ModulationKind,
    amplitude: f64,
    frequency: f64,
}

impl ModulationSpec {
    pub fn none() -> Self {
        Self { kind: ModulationKind::None, amplitude: 0.0, frequency: 0.0 }
    }

    pub fn new(kind: ModulationKind, amplitude: f64, frequency: f64) -> Result<Self> {
        if !amplitude.is_finite() || !(0.0..MAX_MODULATION_AMPLITUDE).contains(&amplitude) {
            return Err(ModelError::invalid(
                "amplitude",
                format!("must lie in [0, {MAX_MODULATION_AMPLITUDE}), got {amplitude}"),
            ));
        }
        if !frequency.is_finite() || frequency < 0.0 {
            return Err(ModelError::invalid("frequency", format!("must be >= 0, got {frequency}")));
        }
        if kind == ModulationKind::None && amplitude != 0.0 {
            return Err(ModelError::invalid("amplitude", "must be 0 for an unmodulated crystal"));
        }
        Ok(Self { kind, amplitude, frequency })
    }

    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Relative modulation `amplitude * sin(frequency * t)`; zero when
    /// unmodulated.
    pub fn relative(&self, t: f64) -> f64 {
        if self.kind == ModulationKind::None {
            0.0
        } else {
            self.amplitude * (self.frequency * t).sin()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalParams {
    n0: f64,
    a: f64,
    b: f64,
    modulation: ModulationSpec,
}

impl CrystalParams {
    /// General static crystal or a modulated matched crystal. Modulated
    /// crystals must satisfy `b = 2 n0 a`.
    pub fn new(n0: f64, a: f64, b: f64, modulation: ModulationSpec) -> Result<Self> {
        if !n0.is_finite() || n0 < 1.0 {
            return Err(ModelError::invalid("n0", format!("refractive index must be >= 1, got {n0}")));
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(ModelError::invalid("a", format!("slab half-thickness must be > 0, got {a}")));
        }
        if !b.is_finite() || b <= 0.0 {
            return Err(ModelError::invalid("b", format!("vacuum spacing must be > 0, got {b}")));
        }
        match modulation.kind {
            ModulationKind::TightBindingHopping => {
                return Err(ModelError::invalid(
                    "modulation",
                    "hopping modulation applies to coupled-cavity arrays, not slab crystals",
                ))
            }
            ModulationKind::RefractiveIndex | ModulationKind::LatticeConstant => {
                let matched = 2.0 * n0 * a;
                if (b - matched).abs() > 1e-12 * matched {
                    return Err(ModelError::invalid(
                        "b",
                        format!("modulated crystals require b = 2 n0 a = {matched}, got {b}"),
                    ));
                }
            }
            ModulationKind::None => {}
        }
        Ok(Self { n0, a, b, modulation })
    }

    /// Matched geometry `b = 2 n0 a`.
    pub fn matched(n0: f64, a: f64, modulation: ModulationSpec) -> Result<Self> {
        Self::new(n0, a, 2.0 * n0 * a, modulation)
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn modulation(&self) -> &ModulationSpec {
        &self.modulation
    }

    pub fn period(&self) -> f64 {
        2.0 * self.a + self.b
    }

    pub fn is_matched(&self) -> bool {
        let matched = 2.0 * self.n0 * self.a;
        (self.b - matched).abs() <= 1e-12 * matched
    }

    fn require_matched(&self) -> Result<()> {
        if self.is_matched() {
            Ok(())
        } else {
            Err(ModelError::Domain(format!(
                "closed form needs b = 2 n0 a (n0 = {}, a = {}, b = {})",
                self.n0, self.a, self.b
            )))
        }
    }

    /// `(n, a, b)` at time `t` under the crystal's modulation law.
    fn instantaneous(&self, t: f64) -> (f64, f64, f64) {
        let s = self.modulation.relative(t);
        match self.modulation.kind {
            ModulationKind::RefractiveIndex => (self.n0 * (1.0 + s), self.a, self.b),
            ModulationKind::LatticeConstant => (self.n0, self.a * (1.0 + s), self.b * (1.0 + s)),
            _ => (self.n0, self.a, self.b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandEdge {
    pub band_index: u32,
    pub k_gap: f64,
    pub omega_lower: f64,
    pub omega_upper: f64,
}

impl BandEdge {
    pub fn width(&self) -> f64 {
        self.omega_upper - self.omega_lower
    }

    pub fn is_degenerate(&self) -> bool {
        self.omega_upper == self.omega_lower
    }
}

/// First-order coefficients of the refractive-index-modulated gap edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCoefficients {
    /// `x_g = 2 omega_g n0 a`.
    pub x_g: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// `cos(k L(t)) - RHS(omega, t)`; vanishes exactly on the bands.
pub fn implicit_dispersion_residual(params: &CrystalParams, k: f64, omega: f64, t: f64) -> f64 {
    let (n, a, b) = params.instantaneous(t);
    let period = 2.0 * a + b;
    let phase_gap = omega * b;
    let phase_slab = 2.0 * omega * n * a;
    let rhs = phase_gap.cos() * phase_slab.cos() - (n * n + 1.0) / (2.0 * n) * phase_gap.sin() * phase_slab.sin();
    (k * period).cos() - rhs
}

fn check_band(band: u32) -> Result<()> {
    if band < 1 {
        Err(ModelError::Domain("band index must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `theta = 4 n a omega` on band `band` for `cos(theta) = y`: odd bands take
/// the principal branch shifted by `(band - 1) pi`, even bands the reflected
/// one, so `theta` rises with `|k|` through the extended zone.
fn branch_theta(y: f64, band: u32) -> f64 {
    let principal = y.clamp(-1.0, 1.0).acos();
    let m = band as f64;
    if band % 2 == 1 {
        (m - 1.0) * PI + principal
    } else {
        m * PI - principal
    }
}

fn matched_argument(n0: f64, a: f64, k: f64) -> f64 {
    let np1 = 1.0 + n0;
    (4.0 * n0 * (2.0 * k * a * np1).cos() + (1.0 - n0).powi(2)) / (np1 * np1)
}

/// Closed-form static dispersion of a matched crystal on band `band`.
pub fn explicit_dispersion_static(params: &CrystalParams, k: f64, band: u32) -> Result<f64> {
    check_band(band)?;
    params.require_matched()?;
    let y = matched_argument(params.n0, params.a, k);
    Ok(branch_theta(y, band) / (4.0 * params.n0 * params.a))
}

/// Band of the extended-zone scheme that wavenumber `k` falls in.
pub fn extended_zone_band(params: &CrystalParams, k: f64) -> u32 {
    let idx = (k.abs() * params.period() / PI).floor() as u32;
    idx + 1
}

/// Edges of gap `band` at `k = band * pi / L` for a matched crystal.
///
/// The lower edge is closed form; the upper edge is located by bisection on
/// the static implicit relation between the gap centre and the top of the
/// next band. Even gaps of a matched stack are closed and come back
/// degenerate, as does every gap at `n0 = 1`.
pub fn gap_edge_static(params: &CrystalParams, band: u32) -> Result<BandEdge> {
    check_band(band)?;
    params.require_matched()?;
    let (n0, a) = (params.n0, params.a);
    let scale = 4.0 * n0 * a;
    let m = band as f64;
    let k_gap = m * PI / params.period();
    let static_params = CrystalParams { modulation: ModulationSpec::none(), ..*params };

    if band.is_multiple_of(2) {
        let edge = m * PI / scale;
        return Ok(BandEdge { band_index: band, k_gap, omega_lower: edge, omega_upper: edge });
    }

    let y_edge = (1.0 + n0 * n0 - 6.0 * n0) / (1.0 + n0 * n0 + 2.0 * n0);
    let omega_lower = branch_theta(y_edge, band) / scale;

    let lo = m * PI / scale;
    let hi = (m + 1.0) * PI / scale;
    let f = |w: f64| implicit_dispersion_residual(&static_params, k_gap, w, 0.0);
    // Residual at the gap centre is (n0 - 1)^2 / (2 n0): zero means no gap.
    if f(lo) <= 0.0 {
        return Ok(BandEdge { band_index: band, k_gap, omega_lower, omega_upper: omega_lower });
    }
    let omega_upper = bisect(f, lo, hi, EDGE_TOLERANCE)?;
    Ok(BandEdge { band_index: band, k_gap, omega_lower, omega_upper })
}

/// Coefficients of the first-order gap-edge shift for odd gap `band`.
///
/// Linearizing the modulated relation around the static lower edge
/// `x_g = 2 omega_g n0 a` gives `delta x = (alpha / beta) xi(t)` with
/// `beta = ((n0+1)^2 / 2n0) sin(2 x_g)` (the slope of the static right-hand
/// side) and `alpha = -((n0+1)^2 / 4n0) x_g sin(2 x_g) - ((n0^2-1)/2n0) sin^2 x_g`
/// (minus its derivative with respect to `xi`).
pub fn edge_coefficients(params: &CrystalParams, band: u32) -> Result<EdgeCoefficients> {
    let edge = gap_edge_static(params, band)?;
    let n0 = params.n0;
    let x_g = 2.0 * edge.omega_lower * n0 * params.a;
    let s2 = (2.0 * x_g).sin();
    if s2.abs() < 1e-12 {
        return Err(ModelError::Breakdown(format!("sin(2 x_g) = {s2:e}: the gap is closed and beta is singular")));
    }
    let np1sq = (n0 + 1.0).powi(2);
    let beta = np1sq / (2.0 * n0) * s2;
    let alpha = -np1sq / (4.0 * n0) * x_g * s2 - (n0 * n0 - 1.0) / (2.0 * n0) * x_g.sin().powi(2);
    Ok(EdgeCoefficients { x_g, alpha, beta })
}

/// Edge-oscillation amplitude `xi_bar` of the lower edge of gap `band`.
pub fn edge_shift_amplitude(params: &CrystalParams, band: u32) -> Result<f64> {
    let m = params.modulation;
    match m.kind {
        ModulationKind::None => Ok(0.0),
        ModulationKind::RefractiveIndex => {
            let c = edge_coefficients(params, band)?;
            Ok(c.alpha / (2.0 * params.n0 * params.a * c.beta) * m.amplitude)
        }
        ModulationKind::LatticeConstant => {
            // omega_g(t) = omega_g [1 - eta sin(omega_c t)]
            Ok(-gap_edge_static(params, band)?.omega_lower * m.amplitude)
        }
        ModulationKind::TightBindingHopping => unreachable!("rejected at construction"),
    }
}

/// Instantaneous lower edge of gap `band` to first order in the modulation.
pub fn dynamic_gap_edge(params: &CrystalParams, band: u32, t: f64) -> Result<f64> {
    let omega_g = gap_edge_static(params, band)?.omega_lower;
    let xi_bar = edge_shift_amplitude(params, band)?;
    Ok(omega_g + xi_bar * (params.modulation.frequency * t).sin())
}

/// Curvature `A = L^2 / (4 n0 a beta)` of the first gap; the lower band
/// follows `omega_l - A (k - k0)^2` and the upper band `omega_u + A (k - k0)^2`.
pub fn effective_mass_coefficient(params: &CrystalParams) -> Result<f64> {
    let c = edge_coefficients(params, 1)?;
    let l = params.period();
    let a_coef = l * l / (4.0 * params.n0 * params.a * c.beta);
    if !(a_coef > 0.0) || !a_coef.is_finite() {
        return Err(ModelError::Breakdown(format!(
            "non-positive curvature A = {a_coef}: effective-mass approximation invalid"
        )));
    }
    Ok(a_coef)
}

/// Effective-mass model of the first gap for a static or
/// refractive-index-modulated crystal. Curvature is unmodulated at first
/// order, so `xi_prime = 0`.
pub fn refractive_index_model(params: &CrystalParams) -> Result<EffectiveMassModel> {
    match params.modulation.kind {
        ModulationKind::None | ModulationKind::RefractiveIndex => {}
        other => return Err(ModelError::Domain(format!("refractive-index model requested for {other:?} modulation"))),
    }
    let edge = gap_edge_static(params, 1)?;
    let model = EffectiveMassModel::new(edge.omega_lower, effective_mass_coefficient(params)?, edge.k_gap)?;
    model.with_modulation(edge_shift_amplitude(params, 1)?, params.modulation.frequency)
}

/// Effective-mass model of the first gap under lattice-constant modulation,
/// `omega_g(t) = omega_g [1 - eta sin]`, `A(t) = A [1 + eta_bar sin]` with
/// `eta_bar = eta [1 - theta cot(theta)]`, `theta = 4 omega_g n a`.
/// `include_curvature = false` zeroes `eta_bar`.
pub fn lattice_modulation_model(params: &CrystalParams, include_curvature: bool) -> Result<EffectiveMassModel> {
    match params.modulation.kind {
        ModulationKind::None | ModulationKind::LatticeConstant => {}
        other => return Err(ModelError::Domain(format!("lattice model requested for {other:?} modulation"))),
    }
    let edge = gap_edge_static(params, 1)?;
    let theta = 4.0 * edge.omega_lower * params.n0 * params.a;
    let eta = params.modulation.amplitude;
    let eta_bar = if include_curvature && eta != 0.0 {
        let s = theta.sin();
        if s.abs() < 1e-12 {
            return Err(ModelError::Breakdown(format!("cot({theta}) is singular")));
        }
        eta * (1.0 - theta * theta.cos() / s)
    } else {
        0.0
    };
    let mut model = EffectiveMassModel::new(edge.omega_lower, effective_mass_coefficient(params)?, edge.k_gap)?
        .with_modulation(-edge.omega_lower * eta, params.modulation.frequency)?;
    model.a_bar = eta_bar;
    model.validate()?;
    Ok(model)
}

/// Band-`band` frequency at wavenumber `k` and time `t`, including the
/// modulation. Lattice modulation keeps the crystal matched, so the closed
/// form applies with the instantaneous geometry; refractive-index
/// modulation is solved numerically from the implicit relation.
pub fn band_frequency(params: &CrystalParams, k: f64, band: u32, t: f64) -> Result<f64> {
    check_band(band)?;
    params.require_matched()?;
    match params.modulation.kind {
        ModulationKind::None => explicit_dispersion_static(params, k, band),
        ModulationKind::LatticeConstant => {
            let (n, a, b) = params.instantaneous(t);
            let now = CrystalParams { n0: n, a, b, modulation: ModulationSpec::none() };
            explicit_dispersion_static(&now, k, band)
        }
        ModulationKind::RefractiveIndex => solve_band_numerically(params, k, band, t),
        ModulationKind::TightBindingHopping => unreachable!("rejected at construction"),
    }
}

fn solve_band_numerically(params: &CrystalParams, k: f64, band: u32, t: f64) -> Result<f64> {
    let guess = explicit_dispersion_static(params, k, band)?;
    let scale = 4.0 * params.n0 * params.a;
    let m = band as f64;
    let lo = ((m - 1.5) * PI / scale).max(0.0);
    let hi = (m + 0.5) * PI / scale;
    let f = |w: f64| implicit_dispersion_residual(params, k, w, t);

    const SAMPLES: usize = 4000;
    let step = (hi - lo) / SAMPLES as f64;
    let mut best: Option<f64> = None;
    let mut consider = |root: f64| {
        if best.is_none_or(|b: f64| (root - guess).abs() < (b - guess).abs()) {
            best = Some(root);
        }
    };
    let mut prev = (lo, f(lo));
    if prev.1 == 0.0 {
        consider(lo);
    }
    for i in 1..=SAMPLES {
        let w = lo + i as f64 * step;
        let fw = f(w);
        if fw == 0.0 {
            consider(w);
        } else if prev.1 * fw < 0.0 {
            consider(bisect(f, prev.0, w, EDGE_TOLERANCE)?);
        }
        prev = (w, fw);
    }
    if let Some(root) = best {
        if (root - guess).abs() < 4.0 * step + params.modulation.amplitude * guess.max(step) * 4.0 {
            return Ok(root);
        }
    }
    // Tangential contact (band extrema at k = 0 or the zone edge).
    let width = 4.0 * step;
    let m = golden_section(|w| f(w).powi(2), (guess - width).max(0.0), guess + width, 1e-14, 200)?;
    if f(m.x).abs() < 1e-9 {
        Ok(m.x)
    } else {
        Err(ModelError::Domain(format!("no band-{band} solution at k = {k}, t = {t}")))
    }
}

/// Coupled-cavity band `omega_cav - J(t) cos(k a)` with
/// `J(t) = J [1 + amplitude sin(omega_c t)]`. Periodic in `k` with period
/// `2 pi / a`; the physical zone is `|k a| <= pi`.
pub fn tight_binding_dispersion(
    omega_cav: f64,
    hopping: f64,
    lattice: f64,
    k: f64,
    t: f64,
    modulation: &ModulationSpec,
) -> f64 {
    let j_t = hopping * (1.0 + modulation.relative(t));
    omega_cav - j_t * (k * lattice).cos()
}

/// Effective-mass reduction of the coupled-cavity band at the zone edge
/// `k0 = pi / a`: edge `omega_cav + J(t)`, curvature `J(t) a^2 / 2`. The band
/// lies below this edge (`omega = omega_g(t) - A(t) (k - k0)^2`).
pub fn tight_binding_edge_model(
    omega_cav: f64,
    hopping: f64,
    lattice: f64,
    modulation: &ModulationSpec,
) -> Result<EffectiveMassModel> {
    match modulation.kind {
        ModulationKind::None | ModulationKind::TightBindingHopping => {}
        other => return Err(ModelError::Domain(format!("coupled-cavity model requested for {other:?} modulation"))),
    }
    if !(hopping > 0.0) {
        return Err(ModelError::invalid("hopping", "must be positive"));
    }
    if !(lattice > 0.0) {
        return Err(ModelError::invalid("lattice", "must be positive"));
    }
    let amp = if modulation.kind == ModulationKind::None { 0.0 } else { modulation.amplitude };
    EffectiveMassModel::new(omega_cav + hopping, 0.5 * hopping * lattice * lattice, PI / lattice)?
        .with_modulation(hopping * amp, modulation.frequency)?
        .with_curvature_modulation(amp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // n0 = 2, a = 1, b = 4, L = 6; frozen from an independent evaluation.
    const OMEGA_L: f64 = 0.307_739_854_335_193_7;
    const OMEGA_U: f64 = 0.477_658_309_062_254_6;
    const A_COEF: f64 = 3.181_980_515_339_464;

    fn crystal(n0: f64) -> CrystalParams {
        CrystalParams::matched(n0, 1.0, ModulationSpec::none()).unwrap()
    }

    fn refractive(xi: f64, wc: f64) -> CrystalParams {
        let m = ModulationSpec::new(ModulationKind::RefractiveIndex, xi, wc).unwrap();
        CrystalParams::matched(2.0, 1.0, m).unwrap()
    }

    #[test]
    fn construction_invariants() {
        assert!(CrystalParams::new(0.5, 1.0, 1.0, ModulationSpec::none()).is_err());
        assert!(CrystalParams::new(2.0, 0.0, 1.0, ModulationSpec::none()).is_err());
        let m = ModulationSpec::new(ModulationKind::RefractiveIndex, 0.01, 0.1).unwrap();
        assert!(CrystalParams::new(2.0, 1.0, 3.0, m).is_err());
        let tb = ModulationSpec::new(ModulationKind::TightBindingHopping, 0.01, 0.1).unwrap();
        assert!(CrystalParams::matched(2.0, 1.0, tb).is_err());
        assert!(ModulationSpec::new(ModulationKind::RefractiveIndex, 0.1, 0.1).is_err());
        assert!(ModulationSpec::new(ModulationKind::None, 0.01, 0.1).is_err());
        assert!(ModulationSpec::new(ModulationKind::LatticeConstant, 0.01, -1.0).is_err());
        let c = crystal(2.0);
        assert_eq!(c.period(), 6.0);
        assert_eq!(c.b(), 4.0);
    }

    #[test]
    fn vacuum_residual_vanishes_on_light_line() {
        let c = CrystalParams::new(1.0, 0.7, 1.4, ModulationSpec::none()).unwrap();
        for i in 0..=20 {
            let k = i as f64 / 20.0 * PI / (4.0 * 0.7);
            assert!(implicit_dispersion_residual(&c, k, k, 0.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_amplitude_matches_static_residual() {
        let m = refractive(0.0, 0.1);
        let s = crystal(2.0);
        for &(k, w, t) in &[(0.1, 0.2, 3.0), (0.5, 0.31, 17.0), (0.9, 0.6, 0.4)] {
            assert_eq!(implicit_dispersion_residual(&m, k, w, t), implicit_dispersion_residual(&s, k, w, t));
        }
    }

    #[test]
    fn residual_at_lower_edge() {
        let c = crystal(2.0);
        let e = gap_edge_static(&c, 1).unwrap();
        assert!(implicit_dispersion_residual(&c, PI / 6.0, e.omega_lower, 0.0).abs() < 1e-9);
        assert!(implicit_dispersion_residual(&c, PI / 6.0, e.omega_upper, 0.0).abs() < 1e-9);
    }

    #[test]
    fn explicit_dispersion_examples() {
        let c = crystal(2.0);
        let wg = explicit_dispersion_static(&c, PI / 6.0, 1).unwrap();
        assert_relative_eq!(wg, OMEGA_L, epsilon = 1e-14);
        assert_relative_eq!(wg, (-7.0f64 / 9.0).acos() / 8.0, epsilon = 1e-15);
        // Band 1 starts at omega = 0; the implicit relation agrees.
        let w0 = explicit_dispersion_static(&c, 0.0, 1).unwrap();
        assert_eq!(w0, 0.0);
        assert!(implicit_dispersion_residual(&c, 0.0, w0, 0.0).abs() < 1e-15);
        assert!(explicit_dispersion_static(&c, 0.1, 0).is_err());
        let unmatched = CrystalParams::new(2.0, 1.0, 3.0, ModulationSpec::none()).unwrap();
        assert!(explicit_dispersion_static(&unmatched, 0.1, 1).is_err());
    }

    #[test]
    fn vacuum_light_line_extended_zone() {
        let c = crystal(1.0);
        for i in 0..200 {
            let k = i as f64 * 0.037;
            let band = extended_zone_band(&c, k);
            let w = explicit_dispersion_static(&c, k, band).unwrap();
            assert!((w - k).abs() < 1e-9, "k = {k}, w = {w}");
        }
    }

    #[test]
    fn static_gap_edges() {
        let e = gap_edge_static(&crystal(2.0), 1).unwrap();
        assert_relative_eq!(e.omega_lower, OMEGA_L, epsilon = 1e-14);
        assert!((e.omega_upper - OMEGA_U).abs() < 1e-12);
        assert_relative_eq!(e.k_gap, PI / 6.0, epsilon = 1e-15);
        let upper_closed = explicit_dispersion_static(&crystal(2.0), PI / 6.0, 2).unwrap();
        assert!((e.omega_upper - upper_closed).abs() < 1e-12);

        let vac = gap_edge_static(&crystal(1.0), 1).unwrap();
        assert!(vac.is_degenerate());
        assert_relative_eq!(vac.omega_lower, PI / 4.0, epsilon = 1e-15);

        let even = gap_edge_static(&crystal(2.0), 2).unwrap();
        assert!(even.is_degenerate());

        let third = gap_edge_static(&crystal(2.0), 3).unwrap();
        assert!(third.width() > 0.0);
        assert!(implicit_dispersion_residual(&crystal(2.0), third.k_gap, third.omega_upper, 0.0).abs() < 1e-9);
    }

    #[test]
    fn upper_edge_found_for_large_index() {
        for &n in &[3.5, 4.0, 6.0] {
            let c = crystal(n);
            let e = gap_edge_static(&c, 1).unwrap();
            let closed = explicit_dispersion_static(&c, e.k_gap, 2).unwrap();
            assert!((e.omega_upper - closed).abs() < 1e-12, "n0 = {n}");
        }
    }

    #[test]
    fn curvature_coefficient() {
        let a = effective_mass_coefficient(&crystal(2.0)).unwrap();
        assert_relative_eq!(a, A_COEF, epsilon = 1e-12);
        assert_relative_eq!(a, 2.0 / (OMEGA_L * 8.0).sin(), epsilon = 1e-12);
        // Independent of the modulation amplitude.
        let am = effective_mass_coefficient(&refractive(0.05, 0.1)).unwrap();
        assert_eq!(a, am);
        assert!(effective_mass_coefficient(&crystal(1.0)).unwrap_err().is_breakdown());
    }

    #[test]
    fn quadratic_fit_near_gap() {
        let c = crystal(2.0);
        let k0 = PI / 6.0;
        let e = gap_edge_static(&c, 1).unwrap();
        let fit = |q: f64| {
            let lower = (e.omega_lower - explicit_dispersion_static(&c, k0 - q, 1).unwrap()) / (q * q);
            let upper = (explicit_dispersion_static(&c, k0 + q, 2).unwrap() - e.omega_upper) / (q * q);
            ((lower - A_COEF).abs(), (upper - A_COEF).abs())
        };
        let (l1, u1) = fit(1e-2);
        let (l2, u2) = fit(1e-3);
        assert!(l2 / A_COEF < 1e-4 && u2 / A_COEF < 1e-4);
        // Deviation from the parabola is o((k - k0)^2).
        assert!(l2 < l1 / 50.0 && u2 < u1 / 50.0);
    }

    #[test]
    fn dynamic_edge_reductions() {
        let c = refractive(0.0, 0.1);
        assert_eq!(dynamic_gap_edge(&c, 1, 12.3).unwrap(), OMEGA_L);
        let c = refractive(0.01, 0.1);
        let period = std::f64::consts::TAU / 0.1;
        assert!((dynamic_gap_edge(&c, 1, period).unwrap() - OMEGA_L).abs() < 1e-15);
        assert!(dynamic_gap_edge(&c, 2, 1.0).unwrap_err().is_breakdown());
    }

    #[test]
    fn dynamic_edge_tracks_modulated_root() {
        // Root of the modulated implicit relation at k = pi/L near the lower edge.
        let exact = |xi: f64, t: f64| {
            let c = refractive(xi, 0.1);
            bisect(|w| implicit_dispersion_residual(&c, PI / 6.0, w, t), 0.25, PI / 8.0, 1e-15).unwrap()
        };
        let t = std::f64::consts::FRAC_PI_2 / 0.1;
        let e1 = (dynamic_gap_edge(&refractive(0.01, 0.1), 1, t).unwrap() - exact(0.01, t)).abs();
        let e2 = (dynamic_gap_edge(&refractive(0.005, 0.1), 1, t).unwrap() - exact(0.005, t)).abs();
        assert!((e1 / e2 - 4.0).abs() < 0.6, "ratio {}", e1 / e2);
    }

    #[test]
    fn refractive_model_assembly() {
        let m = refractive_index_model(&refractive(0.01, 0.1)).unwrap();
        assert_relative_eq!(m.omega_g, OMEGA_L, epsilon = 1e-14);
        assert_relative_eq!(m.a_coef, A_COEF, epsilon = 1e-12);
        assert_eq!(m.xi_prime, 0.0);
        assert_eq!(m.omega_c, 0.1);
        let c = edge_coefficients(&refractive(0.01, 0.1), 1).unwrap();
        assert_relative_eq!(m.xi_bar, c.alpha / (4.0 * c.beta) * 0.01, epsilon = 1e-15);
    }

    #[test]
    fn lattice_model() {
        let m = ModulationSpec::new(ModulationKind::LatticeConstant, 0.01, 0.1).unwrap();
        let c = CrystalParams::matched(2.0, 1.0, m).unwrap();
        let model = lattice_modulation_model(&c, true).unwrap();
        assert_relative_eq!(model.xi_bar, -0.01 * OMEGA_L, epsilon = 1e-15);
        assert_relative_eq!(model.a_bar, 0.040_464_691_297_848_6, epsilon = 1e-12);
        let flat = lattice_modulation_model(&c, false).unwrap();
        assert_eq!(flat.a_bar, 0.0);
        // eta = 0 is the static model.
        let s = lattice_modulation_model(&crystal(2.0), true).unwrap();
        assert!(s.is_static());
        assert_eq!(s.omega_g, refractive_index_model(&crystal(2.0)).unwrap().omega_g);
        // Same functional form as the refractive model once eta_bar is zeroed.
        let q = 0.01;
        let t = 7.0;
        let expect = flat.edge_at(t) + flat.a_coef * q * q;
        assert_relative_eq!(flat.omega_at(flat.k0 + q, t), expect, epsilon = 1e-15);
    }

    #[test]
    fn lattice_dispersion_follows_scaled_edge() {
        let m = ModulationSpec::new(ModulationKind::LatticeConstant, 0.01, 0.1).unwrap();
        let c = CrystalParams::matched(2.0, 1.0, m).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / 0.1;
        // Band top at the instantaneous zone edge.
        let l_t = 6.0 * 1.01;
        let w = band_frequency(&c, PI / l_t, 1, t).unwrap();
        assert_relative_eq!(w, OMEGA_L / 1.01, epsilon = 1e-14);
        assert!(implicit_dispersion_residual(&c, PI / l_t, w, t).abs() < 1e-12);
    }

    #[test]
    fn refractive_band_solution_satisfies_relation() {
        let c = refractive(0.02, 0.1);
        let t = 11.0;
        for i in 0..=10 {
            let k = i as f64 / 10.0 * PI / 6.0;
            for band in 1..=2 {
                let w = band_frequency(&c, k, band, t).unwrap();
                assert!(implicit_dispersion_residual(&c, k, w, t).abs() < 1e-9, "k {k} band {band}");
                let s = explicit_dispersion_static(&c, k, band).unwrap();
                assert!((w - s).abs() < 0.05);
            }
        }
    }

    #[test]
    fn tight_binding() {
        let m = ModulationSpec::new(ModulationKind::TightBindingHopping, 0.05, 0.2).unwrap();
        let (wcav, j, a) = (1.0, 0.1, 2.0);
        for i in 0..10 {
            let t = i as f64 * 1.7;
            let w = tight_binding_dispersion(wcav, j, a, PI / (2.0 * a), t, &m);
            assert!((w - wcav).abs() < 1e-15);
        }
        let s = ModulationSpec::none();
        assert_relative_eq!(tight_binding_dispersion(wcav, j, a, 0.0, 5.0, &s), wcav - j);

        let model = tight_binding_edge_model(wcav, j, a, &m).unwrap();
        assert_relative_eq!(model.omega_g, wcav + j);
        assert_relative_eq!(model.a_coef, j * a * a / 2.0);
        assert_relative_eq!(model.k0, PI / a);
        // Quadratic fit at t = 0 below the edge.
        let q = 1e-3;
        let w = tight_binding_dispersion(wcav, j, a, PI / a + q, 0.0, &m);
        let curvature = (model.omega_g - w) / (q * q);
        assert!((curvature - model.a_coef).abs() / model.a_coef < 1e-5);
    }
}
