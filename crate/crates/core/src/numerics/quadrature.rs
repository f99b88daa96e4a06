//! Composite Gauss-Legendre quadrature.
//!
//! Nodes and weights are generated once per rule by Newton iteration on the
//! Legendre polynomial, so any order can be requested. The composite driver
//! splits `[a, b]` into equal panels and applies the rule on each panel;
//! oscillatory integrands are handled by choosing enough panels to put a
//! fixed number of nodes on every period.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `order` nodes on `[-1, 1]`.
    ///
    /// *Panics* if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th root, refined by Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]` split into `panels` equal panels.
    pub fn integrate<F>(&self, a: f64, b: f64, panels: usize, f: F) -> f64
    where
        F: Fn(f64) -> f64,
    {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + half * x);
            }
            total += acc * half;
        }
        total
    }

    /// Complex-valued counterpart of [`GaussLegendre::integrate`].
    pub fn integrate_complex<F>(&self, a: f64, b: f64, panels: usize, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += f(mid + half * x) * *w;
            }
            total += acc * half;
        }
        total
    }

    /// Number of panels on an interval of length `length` so that an
    /// oscillation of angular frequency `omega_max` gets at least
    /// `nodes_per_period` nodes per period.
    pub fn panels_for(&self, length: f64, omega_max: f64, nodes_per_period: usize) -> usize {
        if !(length > 0.0) || !(omega_max > 0.0) {
            return 1;
        }
        let periods = length * omega_max / std::f64::consts::TAU;
        let nodes = periods * nodes_per_period as f64;
        ((nodes / self.order() as f64).ceil() as usize).max(1)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
