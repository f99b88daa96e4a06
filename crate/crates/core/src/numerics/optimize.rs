//! Golden-section search for a minimum of a unimodal function on a
//! bracket. Each iteration shrinks the bracket by `1/phi` and reuses one of
//! the two interior evaluations.

use crate::error::{ModelError, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

pub fn golden_section<F>(f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<Minimum>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(ModelError::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for it in 0..max_iter {
        if (b - a).abs() <= xtol {
            let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
            return Ok(Minimum { x, value, iterations: it });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    Err(ModelError::NoConvergence {
        iterations: max_iter,
        detail: format!("bracket still [{a}, {b}] (width {:e} > {xtol:e})", b - a),
    })
}
