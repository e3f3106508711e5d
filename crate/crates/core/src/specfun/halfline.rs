//! Integration over `(0, ∞)` of integrands given as a stable near-field closure
//! plus an exact far-field [`TrigSeries`].
//!
//! `[0, T]` is integrated numerically in wavelength panels, the first panel with
//! an algebraic substitution that removes `r^e` endpoint behaviour. Beyond `T`
//! each series term is integrated on its own: pure powers analytically,
//! oscillating terms by quadrature in `log r` up to `ωr = 40` and by their
//! asymptotic expansion afterwards.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quad::{integrate_panels, Quad};
use super::series::{term_tail, TrigSeries, ASYMPTOTIC_ONSET};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest split point between the numerical and the term-wise tail regions.
    pub truncation_radius: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-11,
            abs_tol: 1e-15,
            truncation_radius: 40.0,
            max_subdivisions: 20_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if !(self.truncation_radius > 0.0) {
            return Err(invalid("truncation radius must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be positive"));
        }
        Ok(())
    }

    pub fn with_tolerance(&self, rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..*self
        }
    }
}

/// Cap on the number of wavelength panels in the numerical region.
pub const MAX_PANELS: f64 = 2000.0;

/// `∫_0^∞ near(r) dr` where `near ≡ tail` on `(0, ∞)` and `near(r) ~ r^origin_exponent` at 0.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    near: &F,
    tail: &TrigSeries,
    origin_exponent: f64,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    if origin_exponent <= -1.0 {
        return Err(Error::Divergent(format!(
            "integrand ~ r^{origin_exponent} at the origin"
        )));
    }
    let scale = tail.max_freq().max(1.0);
    let split = match tail.min_nonzero_freq() {
        None => spec.truncation_radius,
        Some(wmin) => (ASYMPTOTIC_ONSET / wmin)
            .min(MAX_PANELS * PI / scale)
            .min(spec.truncation_radius.max(ASYMPTOTIC_ONSET / scale)),
    };
    let near_part = integrate_near(near, split, PI / scale, origin_exponent, spec)?;
    let n = tail.len().max(1) as f64;
    let mut total = near_part;
    for t in tail.terms() {
        total = total
            + term_tail(
                t,
                split,
                spec.abs_tol / n,
                spec.rel_tol,
                spec.max_subdivisions,
            )?;
    }
    Ok(total)
}

/// `∫_0^b f` with panels of width `width` and a substituted first panel.
pub fn integrate_near<F: Fn(f64) -> f64>(
    f: &F,
    b: f64,
    width: f64,
    origin_exponent: f64,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    let a = width.min(b);
    // r = a x^q turns r^e into x^{q(1+e)-1}, made at least linear.
    let q = (2.0 / (1.0 + origin_exponent)).ceil().clamp(1.0, 8.0);
    let first = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let xq1 = x.powf(q - 1.0);
        let v = f(a * xq1 * x);
        v * a * q * xq1
    };
    let head = integrate_panels(
        &first,
        &[0.0, 0.5, 1.0],
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    )?;
    if b <= a {
        return Ok(head);
    }
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| if i == panels { b } else { a + i as f64 * width })
        .collect();
    let body = integrate_panels(
        f,
        &breaks,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_subdivisions,
    )?;
    Ok(head + body)
}
