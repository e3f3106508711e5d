//! Oscillatory integrals, dimensional reductions, Fejér kernels and the
//! asymptotic constants of the rescaled variations.

pub mod constants;
pub mod fejer;
pub mod halfline;
pub mod quad;
pub mod series;

use std::f64::consts::PI;

use statrs::function::beta::beta as beta_fn;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::model::NoiseProfile;

pub use constants::{constants_table, ConstantsTable};
pub use halfline::{integrate_half_line, QuadratureSpec};
pub use quad::Quad;
pub use series::{TrigSeries, Wave};

/// Surface area `S_{d-1} = 2π^{d/2}/Γ(d/2)` of the unit sphere in `ℝ^d`; `S_0 = 2`.
pub fn sphere_area(d: u32) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0),
    }
}

/// `sin(x)/x` with the removable point.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// `1 - sinc(x)`, accurate for small `x`.
pub fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        // x²/3! - x⁴/5! + x⁶/7! - ...
        let mut term: f64 = x2 / 6.0;
        let mut acc = 0.0f64;
        let mut k = 1.0;
        while term.abs() > 1e-18 * acc.abs().max(1e-300) {
            acc += term;
            term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            k += 1.0;
        }
        acc
    } else {
        1.0 - x.sin() / x
    }
}

/// `c_β = ∫_0^∞ sin(ω) ω^{β-2} dω = Γ(β-1) sin(π(β-1)/2)`, written as
/// `Γ(β)·(π/2)·sinc(π(β-1)/2)` so that `β = 1` needs no special branch.
pub fn c_beta(beta: f64) -> f64 {
    gamma(beta) * PI / 2.0 * sinc(PI * (beta - 1.0) / 2.0)
}

/// `C_{β,d} = S_{d-1} c_β / ((2π)^d · 2(2-β))`, the constant of the temporal covariance.
pub fn temporal_constant(profile: NoiseProfile) -> f64 {
    let d = profile.d as i32;
    sphere_area(profile.d) * c_beta(profile.beta)
        / ((2.0 * PI).powi(d) * 2.0 * (2.0 - profile.beta))
}

/// `h(k) = ∫_0^∞ cos(k r) sin⁴(r/2) r^{β-3} dr`; every cosine transform of
/// `g_te` and `g_sp` is a multiple of it.
pub fn profile_transform(beta: f64, k: f64, spec: &QuadratureSpec) -> Result<Quad> {
    let near = |r: f64| (k * r).cos() * (0.5 * r).sin().powi(4) * r.powf(beta - 3.0);
    let tail = TrigSeries::cos(k)
        .mul(&TrigSeries::sin4_half(1.0))
        .mul(&TrigSeries::power(beta - 3.0));
    integrate_half_line(&near, &tail, beta + 1.0, spec)
}

/// `S_{d-1} ∫_0^∞ f(r) r^{d-1} dr` for a radial profile `f` with far-field series `tail`
/// and origin behaviour `f(r) ~ r^e`.
pub fn radial_reduce<F: Fn(f64) -> f64>(
    d: u32,
    f: &F,
    tail: &TrigSeries,
    origin_exponent: f64,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    if d == 0 {
        return Err(Error::Dimension("d must be at least 1".into()));
    }
    let dm1 = (d - 1) as i32;
    let near = |r: f64| f(r) * r.powi(dm1);
    let tail = tail.shift_power(dm1 as f64);
    Ok(
        integrate_half_line(&near, &tail, origin_exponent + dm1 as f64, spec)?
            .scale(sphere_area(d)),
    )
}

/// An integrand `F(s, v)` on `ℝ^d` depending on `s = ρ·ω` and `v = |ω|`.
pub trait MixedIntegrand {
    fn eval(&self, s: f64, v: f64) -> f64;
    /// `v ↦ F(c·v, v)` as an exact trigonometric series.
    fn tail(&self, c: f64) -> TrigSeries;
    /// `e` with `F(c·v, v) ~ v^e` as `v → 0`.
    fn origin_exponent(&self) -> f64;
}

/// `∫_{ℝ^d} F(ρ·ω, |ω|) dω = S_{d-2} ∫_0^π sin^{d-2}θ ∫_0^∞ F(v cos θ, v) v^{d-1} dv dθ`, `d ≥ 2`.
pub fn mixed_reduce<M: MixedIntegrand + ?Sized>(
    d: u32,
    integrand: &M,
    spec: &QuadratureSpec,
) -> Result<Quad> {
    if d < 2 {
        return Err(Error::Dimension(format!(
            "mixed reduction needs d >= 2, got {d}"
        )));
    }
    let dm1 = (d - 1) as i32;
    let failure = std::cell::RefCell::new(None);
    let inner_err = std::cell::Cell::new(0.0f64);
    let inner = |theta: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let c = theta.cos();
        let near = |v: f64| integrand.eval(c * v, v) * v.powi(dm1);
        let tail = integrand.tail(c).shift_power(dm1 as f64);
        match integrate_half_line(&near, &tail, integrand.origin_exponent() + dm1 as f64, spec) {
            Ok(q) => {
                let w = theta.sin().powi(d as i32 - 2);
                inner_err.set(inner_err.get().max(q.error));
                q.value * w
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let outer = quad::integrate_panels(
        &inner,
        &[0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI],
        spec.abs_tol * 10.0,
        spec.rel_tol.max(1e-11) * 10.0,
        spec.max_subdivisions,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let s = sphere_area(d - 1);
    Ok(Quad {
        value: outer.value * s,
        error: (outer.error + PI * inner_err.get()) * s,
    })
}

/// `F_c⁺(g_te)(j) = ∫_{ℝ^d} cos(j|ω|) sin⁴(|ω|/2) |ω|^{β-d-2} dω`.
pub fn cos_transform_gte(j: i64, profile: NoiseProfile, spec: &QuadratureSpec) -> Result<Quad> {
    Ok(profile_transform(profile.beta, j as f64, spec)?.scale(sphere_area(profile.d)))
}

/// Factor `κ_d` with `F_c(g_sp)(k) = κ_d h(k)`: `2` for `d = 1`, otherwise the
/// transverse integral `S_{d-2} B((d-1)/2, (3-β)/2)`.
pub fn gsp_factor(profile: NoiseProfile) -> f64 {
    if profile.d == 1 {
        2.0
    } else {
        let d = profile.d as f64;
        sphere_area(profile.d - 1) * beta_fn((d - 1.0) / 2.0, (3.0 - profile.beta) / 2.0)
    }
}

/// `F_c(g_sp)(kρ) = ∫_{ℝ^d} cos(k ρ·ω) sin⁴(ρ·ω/2) |ω|^{β-d-2} dω`.
pub fn cos_transform_gsp(k: i64, profile: NoiseProfile, spec: &QuadratureSpec) -> Result<Quad> {
    Ok(profile_transform(profile.beta, k as f64, spec)?.scale(gsp_factor(profile)))
}
