//! Photon density of states of the isotropic effective-mass model.
//!
//! Values are per unit frequency and unit volume, i.e. the volume factor is
//! divided out; everything else (`k0^2 / 2 sqrt(A)` and `(2 pi)^3`) is kept.
//! All shapes diverge as `(omega - omega_g)^(-1/2)` at the edge.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::model::EffectiveMassModel;

/// Default offset above the edge at which frequency grids start.
pub const DEFAULT_EDGE_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DosShape {
    /// Isotropic 3D band edge.
    #[default]
    Isotropic3d,
    /// Single-mode waveguide (per unit length, both `k0 +- q` branches).
    Waveguide1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DosSample {
    pub omega: f64,
    pub rho: f64,
    pub t: f64,
}

fn edge_shape(model: &EffectiveMassModel, edge: f64, omega: f64, shape: DosShape) -> Result<f64> {
    if omega == edge {
        return Err(ModelError::Singular { omega });
    }
    if omega < edge {
        return Ok(0.0);
    }
    let inv = 1.0 / (2.0 * model.a_coef.sqrt() * (omega - edge).sqrt());
    Ok(match shape {
        DosShape::Isotropic3d => model.k0 * model.k0 * inv / TAU.powi(3),
        DosShape::Waveguide1d => 2.0 * inv / TAU,
    })
}

/// Static density of states `k0^2 Theta(omega - omega_g) / (2 sqrt(A) sqrt(omega - omega_g)) / (2 pi)^3`.
pub fn dos_static(model: &EffectiveMassModel, omega: f64) -> Result<f64> {
    edge_shape(model, model.omega_g, omega, DosShape::Isotropic3d)
}

/// Static density of states for the requested geometry.
pub fn dos_static_shaped(model: &EffectiveMassModel, omega: f64, shape: DosShape) -> Result<f64> {
    edge_shape(model, model.omega_g, omega, shape)
}

/// Dynamical density of states: the edge follows `omega_g(t)` and the value
/// carries the factor `1 - (xi'/2) sin(omega_c t)` from the curvature
/// oscillation.
pub fn dos_dynamic(model: &EffectiveMassModel, omega: f64, t: f64) -> Result<f64> {
    dos_dynamic_shaped(model, omega, t, DosShape::Isotropic3d)
}

pub fn dos_dynamic_shaped(model: &EffectiveMassModel, omega: f64, t: f64, shape: DosShape) -> Result<f64> {
    let rho = edge_shape(model, model.edge_at(t), omega, shape)?;
    Ok(rho * (1.0 - 0.5 * model.curvature_modulation() * model.drive(t)))
}

/// Samples the dynamical density of states on `grid` at time `t`.
pub fn sample(model: &EffectiveMassModel, grid: &[f64], t: f64, shape: DosShape) -> Result<Vec<DosSample>> {
    grid.iter()
        .map(|&omega| dos_dynamic_shaped(model, omega, t, shape).map(|rho| DosSample { omega, rho, t }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model() -> EffectiveMassModel {
        EffectiveMassModel::new(0.5, 1.0, 1.0).unwrap()
    }

    #[test]
    fn below_edge_is_zero() {
        assert_eq!(dos_static(&model(), 0.3).unwrap(), 0.0);
        assert_eq!(dos_dynamic(&model(), 0.49, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn edge_is_singular() {
        assert_eq!(dos_static(&model(), 0.5), Err(ModelError::Singular { omega: 0.5 }));
    }

    #[test]
    fn direct_value() {
        let rho = dos_static(&model(), 1.0).unwrap();
        let expect = std::f64::consts::SQRT_2 / (2.0 * TAU.powi(3));
        assert_relative_eq!(rho, expect, epsilon = 1e-15);
    }

    #[test]
    fn square_root_scaling() {
        let m = model();
        for &d in &[1e-6, 1e-3, 0.2] {
            let r = dos_static(&m, 0.5 + 4.0 * d).unwrap() / dos_static(&m, 0.5 + d).unwrap();
            assert_relative_eq!(r, 0.5, max_relative = 1e-9);
        }
    }

    #[test]
    fn dynamic_reductions() {
        let s = model();
        for &t in &[0.0, 3.0, 17.5] {
            assert_eq!(dos_dynamic(&s, 0.8, t).unwrap(), dos_static(&s, 0.8).unwrap());
        }
        let m = s.with_modulation(0.01, 0.1).unwrap().with_curvature_modulation(0.1).unwrap();
        let t = std::f64::consts::FRAC_PI_2 / 0.1;
        let detuning = 0.3;
        let r = dos_dynamic(&m, m.edge_at(t) + detuning, t).unwrap();
        let r0 = dos_static(&s, 0.5 + detuning).unwrap();
        assert_relative_eq!(r / r0, 0.95, epsilon = 1e-12);
    }

    #[test]
    fn waveguide_shape_has_same_edge_law() {
        let m = model();
        let a = dos_static_shaped(&m, 0.9, DosShape::Waveguide1d).unwrap();
        let b = dos_static_shaped(&m, 0.6, DosShape::Waveguide1d).unwrap();
        assert_relative_eq!(a / b, (0.1f64 / 0.4).sqrt(), epsilon = 1e-14);
    }
}
