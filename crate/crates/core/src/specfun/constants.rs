//! Asymptotic expectation and variance constants of the rescaled variations.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{gsp_factor, profile_transform, sphere_area, QuadratureSpec};
use crate::error::{invalid, Result};
use crate::model::NoiseProfile;

pub const DEFAULT_SERIES_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub beta: f64,
    pub d: u32,
    pub c_sp_e: f64,
    pub c_sp_v: f64,
    pub c_te_e: f64,
    pub c_te_v: f64,
    pub c_box_sp_e: f64,
    pub c_box_sp_v: f64,
    pub c_box_te_e: f64,
    pub c_box_te_v: f64,
    /// Largest `|k|` kept in the variance series.
    pub series_truncation: usize,
    /// Estimated relative size of the dropped series tail, `(last term)·cap / sum`.
    pub series_tail: f64,
    /// Bound on the relative error of any constant (quadrature plus series tail).
    pub error_estimate: f64,
}

/// Evaluates every constant for the given noise profile. The variance series are
/// summed over `|k| ≤ series_cap`; the tail is reported, not added.
pub fn constants_table(
    profile: NoiseProfile,
    spec: &QuadratureSpec,
    series_cap: usize,
) -> Result<ConstantsTable> {
    profile.validate()?;
    if series_cap < 16 {
        return Err(invalid(format!(
            "series cap must be at least 16, got {series_cap}"
        )));
    }
    let mut h = Vec::with_capacity(series_cap + 1);
    let mut h_err = 0.0f64;
    for k in 0..=series_cap {
        let q = profile_transform(profile.beta, k as f64, spec)?;
        h_err = h_err.max(q.error);
        h.push(q.value);
    }
    // Σ_{|k|≤cap} h(k)²
    let mut sum_sq = h[0] * h[0];
    for v in &h[1..] {
        sum_sq += 2.0 * v * v;
    }
    let last = 2.0 * h[series_cap] * h[series_cap];
    let series_tail = last * series_cap as f64 / sum_sq;

    let d = profile.d as i32;
    let tpd = (2.0 * PI).powi(d);
    let kappa = gsp_factor(profile);
    let s = sphere_area(profile.d);
    let norm_sp = kappa * h[0];
    let norm_te = s * h[0];
    let sq_sp = kappa * kappa * sum_sq;
    let sq_te = s * s * sum_sq;
    let box_v = 256.0 * 35.0 / (3.0 * tpd * tpd);

    let rel_h = h_err / h[0].abs();
    let rel_sq = 2.0 * h_err * h.iter().map(|v| v.abs()).sum::<f64>() * 2.0 / sum_sq;
    Ok(ConstantsTable {
        beta: profile.beta,
        d: profile.d,
        c_sp_e: 8.0 / tpd * norm_sp,
        c_sp_v: 128.0 / (tpd * tpd) * sq_sp,
        c_te_e: 4.0 / tpd * norm_te,
        c_te_v: 128.0 / (3.0 * tpd * tpd) * sq_te,
        c_box_sp_e: 24.0 / tpd * norm_sp,
        c_box_sp_v: box_v * sq_sp,
        c_box_te_e: 24.0 / tpd * norm_te,
        c_box_te_v: box_v * sq_te,
        series_truncation: series_cap,
        series_tail,
        error_estimate: rel_h.max(rel_sq + series_tail),
    })
}
