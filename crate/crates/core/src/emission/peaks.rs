//! Peak location in sampled spectra.
//!
//! The central line is the global maximum. A local maximum is *dominant*
//! when no sample within half a modulation frequency is higher; this
//! discards the sinc side lobes, which are spaced by `2 pi / t`, while
//! keeping the modulation sidebands at `omega0 +- omega_c`.

use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    /// Position refined by a three-point quadratic fit.
    pub omega: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub central: Peak,
    pub left: Option<Peak>,
    pub right: Option<Peak>,
    /// `left.height / right.height` when both sidebands are present.
    pub ratio_measured: Option<f64>,
    /// `sqrt((omega0 + omega_c - omega_g) / (omega0 - omega_c - omega_g))`.
    pub ratio_predicted: Option<f64>,
}

fn refine(spec: &Spectrum, i: usize) -> Peak {
    let (x, y) = (&spec.omegas, &spec.values);
    let plain = Peak { index: i, omega: x[i], height: y[i] };
    if i == 0 || i + 1 >= x.len() {
        return plain;
    }
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let f01 = (y1 - y0) / (x1 - x0);
    let f12 = (y2 - y1) / (x2 - x1);
    let f012 = (f12 - f01) / (x2 - x0);
    if !(f012 < 0.0) {
        return plain;
    }
    let xs = (0.5 * (x0 + x1) - f01 / (2.0 * f012)).clamp(x0, x2);
    let ys = y0 + f01 * (xs - x0) + f012 * (xs - x0) * (xs - x1);
    Peak { index: i, omega: xs, height: ys.max(y1) }
}

fn is_local_max(v: &[f64], i: usize) -> bool {
    let left_ok = i == 0 || v[i] >= v[i - 1];
    let right_ok = i + 1 == v.len() || v[i] > v[i + 1];
    left_ok && right_ok && v.len() > 1
}

/// Interior local maxima that dominate every sample within `half_window`.
pub fn dominant_maxima(spec: &Spectrum, half_window: f64) -> Vec<Peak> {
    let (x, v) = (&spec.omegas, &spec.values);
    let n = x.len();
    let mut out = Vec::new();
    let mut lo = 0usize;
    let mut hi = 0usize;
    for i in 1..n.saturating_sub(1) {
        while x[i] - x[lo] >= half_window {
            lo += 1;
        }
        while hi + 1 < n && x[hi + 1] - x[i] < half_window {
            hi += 1;
        }
        if !is_local_max(v, i) {
            continue;
        }
        if (lo..=hi).all(|j| v[j] <= v[i]) {
            out.push(refine(spec, i));
        }
    }
    out
}

fn nearest_index(x: &[f64], target: f64) -> usize {
    match x.binary_search_by(|p| p.total_cmp(&target)) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= x.len() => x.len() - 1,
        Err(i) => {
            if target - x[i - 1] <= x[i] - target {
                i - 1
            } else {
                i
            }
        }
    }
}

fn local_spacing(x: &[f64], i: usize) -> f64 {
    let left = if i > 0 { x[i] - x[i - 1] } else { f64::INFINITY };
    let right = if i + 1 < x.len() { x[i + 1] - x[i] } else { f64::INFINITY };
    match (left.is_finite(), right.is_finite()) {
        (true, true) => left.max(right),
        (true, false) => left,
        _ => right,
    }
}

/// Locates the central line and the two modulation sidebands.
///
/// Fails when the grid is too coarse to resolve the sidebands: the spacing
/// near `omega0 +- omega_c` must not exceed `omega_c / 20`.
pub fn find_peaks(spec: &Spectrum, omega_c: f64) -> Result<PeakReport> {
    if spec.omegas.len() < 3 || spec.omegas.len() != spec.values.len() {
        return Err(ModelError::invalid("grid", "need at least three samples"));
    }
    if !(omega_c >= 0.0) {
        return Err(ModelError::invalid("omega_c", "must be >= 0"));
    }
    let x = &spec.omegas;
    let c = spec.argmax().ok_or_else(|| ModelError::invalid("grid", "empty spectrum"))?;
    let central = refine(spec, c);

    let ratio_predicted = {
        let (w0, wg) = (spec.omega0, spec.omega_g);
        (omega_c > 0.0 && w0 - omega_c > wg).then(|| ((w0 + omega_c - wg) / (w0 - omega_c - wg)).sqrt())
    };

    if omega_c == 0.0 {
        return Ok(PeakReport { central, left: None, right: None, ratio_measured: None, ratio_predicted });
    }

    let (lo, hi) = (x[0], x[x.len() - 1]);
    for target in [central.omega - omega_c, central.omega + omega_c] {
        if target > lo && target < hi {
            let spacing = local_spacing(x, nearest_index(x, target));
            if spacing > omega_c / 20.0 {
                return Err(ModelError::Domain(format!(
                    "grid spacing {spacing} near {target} cannot resolve sidebands at omega_c = {omega_c}"
                )));
            }
        }
    }

    let half = 0.5 * omega_c;
    let dominant = dominant_maxima(spec, half);
    let pick = |target: f64| {
        dominant
            .iter()
            .filter(|p| p.index != c && (p.omega - target).abs() < half)
            .copied()
            .max_by(|a, b| a.height.total_cmp(&b.height))
    };
    let left = pick(central.omega - omega_c);
    let right = pick(central.omega + omega_c);
    let ratio_measured = match (left, right) {
        (Some(l), Some(r)) if r.height > 0.0 => Some(l.height / r.height),
        _ => None,
    };
    Ok(PeakReport { central, left, right, ratio_measured, ratio_predicted })
}

/// Full width at half maximum of the peak nearest `omega`, with linear
/// interpolation of the half-height crossings. `None` when a crossing lies
/// outside the grid.
pub fn full_width_half_max(spec: &Spectrum, omega: f64) -> Option<f64> {
    let (x, v) = (&spec.omegas, &spec.values);
    if x.len() < 3 {
        return None;
    }
    let mut i = nearest_index(x, omega);
    // Climb to the local maximum.
    loop {
        if i + 1 < v.len() && v[i + 1] > v[i] {
            i += 1;
        } else if i > 0 && v[i - 1] > v[i] {
            i -= 1;
        } else {
            break;
        }
    }
    let half = 0.5 * refine(spec, i).height;
    let mut l = i;
    while l > 0 && v[l] > half {
        l -= 1;
    }
    let mut r = i;
    while r + 1 < v.len() && v[r] > half {
        r += 1;
    }
    if v[l] > half || v[r] > half {
        return None;
    }
    let cross = |a: usize, b: usize| x[a] + (half - v[a]) * (x[b] - x[a]) / (v[b] - v[a]);
    Some(cross(r - 1, r) - cross(l, l + 1))
}
