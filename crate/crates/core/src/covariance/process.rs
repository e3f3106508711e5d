//! Covariances of the solution `u` itself.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::model::{ModelParams, SamplingDesign};
use crate::specfun::{
    mixed_reduce, one_minus_sinc, radial_reduce, temporal_constant, MixedIntegrand, Quad,
    QuadratureSpec, TrigSeries,
};

/// `E[u(t,x) u(s,x)]` at a fixed point:
/// `C_{β,d} ϑ^{-β/2} [((t+s)^{3-β} - |t-s|^{3-β}) / (2(3-β)) - (t∧s)|t-s|^{2-β}]`.
pub fn temporal_cov_u(t: f64, s: f64, params: &ModelParams) -> f64 {
    if t <= 0.0 || s <= 0.0 {
        return 0.0;
    }
    let b = params.beta;
    let diff = (t - s).abs();
    let bracket = ((t + s).powf(3.0 - b) - diff.powf(3.0 - b)) / (2.0 * (3.0 - b))
        - t.min(s) * diff.powf(2.0 - b);
    temporal_constant(params.profile()) * params.vartheta.powf(-b / 2.0) * bracket
}

/// `E[u(t,x) u(s,y)]` for space-time white noise (`β = d = 1`): the area of
/// the intersection of the two backward light cones, scaled.
pub fn whitenoise_cov_u(t: f64, x: f64, s: f64, y: f64, vartheta: f64) -> f64 {
    if t <= 0.0 || s <= 0.0 {
        return 0.0;
    }
    let c = vartheta.sqrt();
    let r = (x - y).abs() / c;
    if (t - s).abs() > r {
        t.min(s).powi(2) / (4.0 * c)
    } else if r < t + s {
        (t + s - r).powi(2) / (16.0 * c)
    } else {
        0.0
    }
}

/// `∫_{ℝ^d} F dω` for integrands depending on `(ρ·ω, |ω|)`, even in `ρ·ω`.
/// `radial` asserts that `F` ignores its first argument.
pub fn full_space<M: MixedIntegrand>(
    d: u32,
    f: &M,
    radial: bool,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    if d == 1 || radial {
        let c = if d == 1 { 1.0 } else { 0.0 };
        return radial_reduce(
            d,
            &|v: f64| f.eval(c * v, v),
            &f.tail(c),
            f.origin_exponent(),
            spec,
        );
    }
    mixed_reduce(d, f, spec)
}

/// `cos(g s)(1 - sinc(c v)) [sin⁴(s/2)] v^{β-d-2}`
pub(crate) struct SpatialIntegrand {
    pub g: f64,
    pub c: f64,
    pub beta: f64,
    pub d: u32,
    pub with_increment: bool,
}

impl MixedIntegrand for SpatialIntegrand {
    fn eval(&self, s: f64, v: f64) -> f64 {
        let mut x = (self.g * s).cos()
            * one_minus_sinc(self.c * v)
            * v.powf(self.beta - self.d as f64 - 2.0);
        if self.with_increment {
            x *= (0.5 * s).sin().powi(4);
        }
        x
    }

    fn tail(&self, cth: f64) -> TrigSeries {
        let mut t = TrigSeries::cos(self.g * cth)
            .mul(&TrigSeries::constant(1.0).add(&TrigSeries::sinc(self.c).scale(-1.0)))
            .mul(&TrigSeries::power(self.beta - self.d as f64 - 2.0));
        if self.with_increment {
            t = t.mul(&TrigSeries::sin4_half(cth));
        }
        t
    }

    fn origin_exponent(&self) -> f64 {
        let base = self.beta - self.d as f64;
        if self.with_increment {
            base + 4.0
        } else {
            base
        }
    }
}

/// `E[u(t, x_k) u(t, x_l)]` on the spatial grid `x_k = λkρ`:
/// `(tλ^{2-β} / (2(2π)^d ϑ)) ∫ cos((k-l)ρ·ω)(1 - sinc(2t√ϑ|ω|/λ)) |ω|^{β-d-2} dω`.
pub fn spatial_cov_u(
    k: i64,
    l: i64,
    design: &SamplingDesign,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let SamplingDesign::Spatial { t, lambda, .. } = *design else {
        return Err(invalid("spatial_cov_u needs a spatial design"));
    };
    let g = (k - l).abs() as f64;
    let f = SpatialIntegrand {
        g,
        c: 2.0 * t * params.vartheta.sqrt() / lambda,
        beta: params.beta,
        d: params.d,
        with_increment: false,
    };
    let q = full_space(params.d, &f, g == 0.0, spec)?;
    let pref = t * lambda.powf(2.0 - params.beta)
        / (2.0 * (2.0 * PI).powi(params.d as i32) * params.vartheta);
    Ok(pref * q.value)
}
