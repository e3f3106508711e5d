//! Fast built-in oracle checks behind `wavespeed selftest`.

use rand_chacha::rand_core::RngCore;
use serde::Serialize;

use crate::covariance::{
    cov_inc_spatial, cov_inc_temporal, temporal_cov_u, whitenoise_cov_u, BoxForm, BoxKernel,
    CovMatrix,
};
use crate::error::Result;
use crate::increments::{inc2_2d, inc2_structured, inc_p, trig_inc, StructuredForm, Trig};
use crate::inference::{mle_whitenoise, second_diff};
use crate::model::{ModelParams, NoiseProfile, SamplingDesign};
use crate::sampler::{factorize, replicate_rng, uniform};
use crate::specfun::fejer::{fejer_sp, fejer_sp_series};
use crate::specfun::{constants_table, QuadratureSpec};

#[derive(Debug, Clone, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<SelfCheck>,
}

fn check(name: &str, max_error: f64, tolerance: f64) -> SelfCheck {
    SelfCheck {
        name: name.to_string(),
        max_error,
        tolerance,
        passed: max_error <= tolerance,
    }
}

fn increments(seed: u64) -> Result<Vec<SelfCheck>> {
    let mut rng = replicate_rng(seed, 0);
    let mut trig_err = 0.0f64;
    let mut form_err = 0.0f64;
    for case in 0..200 {
        let r = 0.05 + 3.0 * uniform(&mut rng);
        let z = (rng.next_u64() % 21) as f64 - 10.0;
        let p = 1 + (case % 4) as u32;
        for kind in [Trig::Cos, Trig::Sin] {
            let brute = inc_p(|x| kind.eval(x * r), p, z);
            trig_err = trig_err.max((trig_inc(kind, p, r, z) - brute).abs());
        }
        let a = 0.2 + uniform(&mut rng);
        let f = move |x: f64| (a * x).cos() + 0.1 * x * x;
        let q = 1.0 + (rng.next_u64() % 8) as f64;
        let zz = q + [0.0, 1.0, -1.0, 3.0][case % 4];
        for form in StructuredForm::ALL {
            let brute = inc2_2d(|u, v| form.kernel(&f, u, v), q, zz);
            let closed = inc2_structured(form, f, q, zz)?;
            form_err = form_err.max((closed - brute).abs() / (1.0 + brute.abs()));
        }
    }
    Ok(vec![
        check("increments/trig closed forms", trig_err, 1e-12),
        check("increments/structured rules", form_err, 1e-12),
    ])
}

fn specfun(spec: &QuadratureSpec) -> Result<Vec<SelfCheck>> {
    let c = constants_table(NoiseProfile::new(1.0, 1)?, spec, 64)?;
    let err = [
        (c.c_sp_e, 1.0),
        (c.c_te_e, 0.5),
        (c.c_sp_v, 3.0),
        (c.c_te_v, 1.0),
        (c.c_box_sp_v, 70.0),
    ]
    .iter()
    .map(|(a, b)| ((a - b) / b).abs())
    .fold(0.0, f64::max);
    let mut fej = 0.0f64;
    for k in 0..50 {
        let x = 0.1 + 0.123 * k as f64;
        fej = fej.max((fejer_sp(x, 17) - fejer_sp_series(x, 17)).abs());
    }
    Ok(vec![
        check("specfun/white-noise constants", err, 1e-8),
        check("specfun/Fejer kernel series", fej, 1e-10),
    ])
}

fn covariance(spec: &QuadratureSpec) -> Result<Vec<SelfCheck>> {
    let p = ModelParams::new(1.0, 0.5, 1)?;
    let mut te = 0.0f64;
    for (i, j) in [(1u64, 1u64), (2, 3), (5, 5), (4, 7)] {
        let want = inc2_2d(|a, b| temporal_cov_u(a, b, &p), i as f64, j as f64);
        te = te.max(((cov_inc_temporal(i, j, &p, spec)? - want) / want).abs());
    }
    let wn = ModelParams::new(1.0, 1.0, 1)?;
    let design = SamplingDesign::Spatial {
        t: 1.0,
        lambda: 0.01,
        n: 3,
    };
    let mut sp = 0.0f64;
    for (g, want) in [(0i64, 0.01), (1, -0.005), (2, 0.0)] {
        sp = sp.max((cov_inc_spatial(g, &design, &wn, spec)? - want).abs() / 0.01);
    }
    let (lambda, delta) = (0.25, 0.5);
    let bd = SamplingDesign::Spacetime {
        lambda,
        delta,
        n: 2,
        m: 2,
    };
    let kernel = BoxKernel::new(&bd, &wn, spec, BoxForm::SpatialForm)?;
    let mut bx = 0.0f64;
    for (i, j, k, l) in [(1, 1, 1, 1), (1, 2, 1, 2), (2, 2, 2, 1)] {
        let h = |q: f64, z: f64| {
            inc2_2d(
                |a, b| whitenoise_cov_u(q * delta, a * lambda, z * delta, b * lambda, 1.0),
                k as f64,
                l as f64,
            )
        };
        let want = inc2_2d(h, i as f64, j as f64);
        bx = bx.max((kernel.cov(i, j, k, l) - want).abs() / kernel.cov(1, 1, 1, 1));
    }
    Ok(vec![
        check("covariance/temporal vs differenced process", te, 1e-6),
        check("covariance/white-noise spatial band", sp, 1e-6),
        check("covariance/box vs light cone", bx, 1e-6),
    ])
}

fn sampler_inference() -> Result<Vec<SelfCheck>> {
    let f = factorize(&CovMatrix {
        dim: 2,
        data: vec![1.0, 1.0, 1.0, 4.0],
        label: "hand".into(),
    })?;
    let chol = (f.get(1, 1) - 3f64.sqrt()).abs() + (f.get(1, 0) - 1.0).abs();
    let mle = (mle_whitenoise(&[1.0, 2.0], 1.0)?.q_direct - 4.0 / 3.0).abs();
    let sd = second_diff(&[0.0, 1.0, 4.0, 9.0])?
        .iter()
        .map(|v| (v - 2.0).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        check("sampler/hand Cholesky", chol, 1e-15),
        check("inference/MLE quadratic form", mle, 1e-14),
        check("inference/second differences", sd, 0.0),
    ])
}

pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let spec = QuadratureSpec::default();
    let mut checks = increments(seed)?;
    checks.extend(specfun(&spec)?);
    checks.extend(covariance(&spec)?);
    checks.extend(sampler_inference()?);
    Ok(SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
