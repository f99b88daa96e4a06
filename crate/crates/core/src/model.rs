//! The reduced band-edge model: near an isotropic band edge the photon
//! dispersion is `omega_k(t) = omega_g(t) + A (k - k0)^2 [1 + s(t)]` with a
//! sinusoidally driven edge `omega_g(t) = omega_g + xi_bar sin(omega_c t)`.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMassModel {
    /// Static (time-averaged) band-edge frequency.
    pub omega_g: f64,
    /// Curvature coefficient `A` of the quadratic dispersion.
    pub a_coef: f64,
    /// Wavenumber at which the gap opens.
    pub k0: f64,
    /// Amplitude of the band-edge oscillation.
    pub xi_bar: f64,
    /// Relative amplitude of the curvature oscillation.
    pub xi_prime: f64,
    /// Modulation angular frequency.
    pub omega_c: f64,
    /// Relative curvature oscillation coming from lattice-constant
    /// modulation. Enters exactly like `xi_prime`; kept apart so the
    /// two sources stay distinguishable.
    pub a_bar: f64,
}

impl EffectiveMassModel {
    /// Unmodulated model.
    pub fn new(omega_g: f64, a_coef: f64, k0: f64) -> Result<Self> {
        let m = Self { omega_g, a_coef, k0, xi_bar: 0.0, xi_prime: 0.0, omega_c: 0.0, a_bar: 0.0 };
        m.validate()?;
        Ok(m)
    }

    /// Model with `A = k0 = 1`, the normalization used whenever only spectral
    /// shapes matter.
    pub fn normalized(omega_g: f64, xi_bar: f64, omega_c: f64) -> Result<Self> {
        Self::new(omega_g, 1.0, 1.0)?.with_modulation(xi_bar, omega_c)
    }

    pub fn with_modulation(mut self, xi_bar: f64, omega_c: f64) -> Result<Self> {
        self.xi_bar = xi_bar;
        self.omega_c = omega_c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_curvature_modulation(mut self, xi_prime: f64) -> Result<Self> {
        self.xi_prime = xi_prime;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_g", self.omega_g),
            ("a_coef", self.a_coef),
            ("k0", self.k0),
            ("xi_bar", self.xi_bar),
            ("xi_prime", self.xi_prime),
            ("omega_c", self.omega_c),
            ("a_bar", self.a_bar),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(ModelError::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.omega_g <= 0.0 {
            return Err(ModelError::invalid("omega_g", "band edge must be positive"));
        }
        if self.a_coef <= 0.0 {
            return Err(ModelError::invalid("a_coef", "curvature A must be positive"));
        }
        if self.k0 <= 0.0 {
            return Err(ModelError::invalid("k0", "gap wavenumber must be positive"));
        }
        if self.omega_c < 0.0 {
            return Err(ModelError::invalid("omega_c", "modulation frequency must be >= 0"));
        }
        if self.xi_bar.abs() >= self.omega_g {
            return Err(ModelError::invalid(
                "xi_bar",
                format!("edge oscillation |{}| must stay below the band edge {}", self.xi_bar, self.omega_g),
            ));
        }
        if self.curvature_modulation().abs() >= 1.0 {
            return Err(ModelError::invalid("xi_prime", "curvature modulation must keep A(t) positive"));
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        self.xi_bar == 0.0 && self.curvature_modulation() == 0.0
    }

    /// Total relative curvature oscillation.
    pub fn curvature_modulation(&self) -> f64 {
        self.xi_prime + self.a_bar
    }

    /// `sin(omega_c t)`.
    pub fn drive(&self, t: f64) -> f64 {
        (self.omega_c * t).sin()
    }

    /// Instantaneous band edge.
    pub fn edge_at(&self, t: f64) -> f64 {
        self.omega_g + self.xi_bar * self.drive(t)
    }

    /// Instantaneous curvature `A(t)`.
    pub fn curvature_at(&self, t: f64) -> f64 {
        self.a_coef * (1.0 + self.curvature_modulation() * self.drive(t))
    }

    /// Mode frequency at wavenumber `k` and time `t`.
    pub fn omega_at(&self, k: f64, t: f64) -> f64 {
        let q = k - self.k0;
        self.edge_at(t) + self.curvature_at(t) * q * q
    }

    /// Modulation period `2 pi / omega_c`, infinite for a static model.
    pub fn period(&self) -> f64 {
        if self.omega_c > 0.0 {
            std::f64::consts::TAU / self.omega_c
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(EffectiveMassModel::new(0.0, 1.0, 1.0).is_err());
        assert!(EffectiveMassModel::new(0.5, -1.0, 1.0).is_err());
        assert!(EffectiveMassModel::new(0.5, 1.0, 0.0).is_err());
        let m = EffectiveMassModel::new(0.5, 1.0, 1.0).unwrap();
        assert!(m.with_modulation(0.6, 0.1).is_err());
        assert!(m.with_modulation(0.01, -0.1).is_err());
        assert!(m.with_curvature_modulation(1.5).is_err());
    }

    #[test]
    fn edge_oscillates_about_static_value() {
        let m = EffectiveMassModel::normalized(0.5, 0.01, 0.1).unwrap();
        assert_eq!(m.edge_at(0.0), 0.5);
        let quarter = m.period() / 4.0;
        assert!((m.edge_at(quarter) - 0.51).abs() < 1e-15);
        assert!((m.edge_at(3.0 * quarter) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn dispersion_shape() {
        let m = EffectiveMassModel::new(0.5, 2.0, 1.0).unwrap();
        assert!((m.omega_at(1.1, 3.0) - (0.5 + 2.0 * 0.01)).abs() < 1e-15);
    }
}
