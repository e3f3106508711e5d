//! Covariances of second-order and box increments.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::kernels::Piece;
use super::process::{full_space, SpatialIntegrand};
use crate::error::{invalid, Result};
use crate::model::{ModelParams, SamplingDesign};
use crate::specfun::{
    integrate_half_line, sphere_area, MixedIntegrand, QuadratureSpec, TrigSeries,
};

/// `Cov(I_sp,k, I_sp,k+gap)`:
/// `(8tλ^{2-β}/((2π)^d ϑ)) ∫ cos(gap ρ·ω)(1 - sinc(2t√ϑ|ω|/λ)) sin⁴(ρ·ω/2) |ω|^{β-d-2} dω`.
pub fn cov_inc_spatial(
    gap: i64,
    design: &SamplingDesign,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let SamplingDesign::Spatial { t, lambda, n } = *design else {
        return Err(invalid("cov_inc_spatial needs a spatial design"));
    };
    if gap.unsigned_abs() as usize >= n.max(1) {
        return Err(invalid(format!("gap {gap} outside 0..{n}")));
    }
    let f = SpatialIntegrand {
        g: gap.abs() as f64,
        c: 2.0 * t * params.vartheta.sqrt() / lambda,
        beta: params.beta,
        d: params.d,
        with_increment: true,
    };
    let q = full_space(params.d, &f, false, spec)?;
    let pref = 8.0 * t * lambda.powf(2.0 - params.beta)
        / ((2.0 * PI).powi(params.d as i32) * params.vartheta);
    Ok(pref * q.value)
}

/// Pieces entering the temporal covariance of increments `i` and `j`, with weights.
fn temporal_terms(i: u64, j: u64) -> Vec<(Piece, f64)> {
    let g = i.abs_diff(j);
    let mut out = vec![
        (Piece::Main(g), 8.0 * i.min(j) as f64),
        (Piece::R1(i + j), -4.0),
    ];
    if g >= 2 {
        out.push((Piece::R1(g), 4.0));
    }
    if g <= 1 {
        out.push((Piece::R2(g), 0.5));
    }
    if g >= 1 {
        out.push((Piece::R3(g), 0.5));
    }
    out
}

/// `S_{d-1} ∫_0^∞ φ(r) r^{β-3} dr`.
fn temporal_piece(piece: Piece, params: &ModelParams, spec: &QuadratureSpec) -> Result<f64> {
    if piece.is_zero() {
        return Ok(0.0);
    }
    let b = params.beta;
    let near = |r: f64| piece.eval(r) * r.powf(b - 3.0);
    let tail = piece.series(1.0).mul(&TrigSeries::power(b - 3.0));
    let q = integrate_half_line(&near, &tail, piece.origin_exponent() + b - 3.0, spec)?;
    Ok(q.value * sphere_area(params.d))
}

fn temporal_prefactor(params: &ModelParams) -> f64 {
    params.vartheta.powf(-params.beta / 2.0) / (2.0 * PI).powi(params.d as i32)
}

/// `Cov(I_te,i, I_te,j)` at `δ = 1`; multiply by `δ^{3-β}` for other step sizes.
pub fn cov_inc_temporal(
    i: u64,
    j: u64,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if i == 0 || j == 0 {
        return Err(invalid("temporal increment indices start at 1"));
    }
    let mut acc = 0.0;
    for (piece, w) in temporal_terms(i, j) {
        acc += w * temporal_piece(piece, params, spec)?;
    }
    Ok(temporal_prefactor(params) * acc)
}

/// Precomputed piece integrals for every temporal pair up to `m`.
#[derive(Debug, Clone)]
pub struct TemporalKernel {
    m: u64,
    prefactor: f64,
    values: HashMap<Piece, f64>,
}

impl TemporalKernel {
    pub fn new(m: u64, params: &ModelParams, spec: &QuadratureSpec) -> Result<Self> {
        let mut keys: Vec<Piece> = (1..=m)
            .flat_map(|i| {
                (i..=m).flat_map(move |j| temporal_terms(i, j).into_iter().map(|(p, _)| p))
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let values = evaluate_all(&keys, |&p| temporal_piece(p, params, spec))?;
        Ok(Self {
            m,
            prefactor: temporal_prefactor(params),
            values,
        })
    }

    /// Covariance at `δ = 1`.
    pub fn cov(&self, i: u64, j: u64) -> f64 {
        assert!(
            i >= 1 && j >= 1 && i <= self.m && j <= self.m,
            "index outside 1..={}",
            self.m
        );
        let acc: f64 = temporal_terms(i, j)
            .into_iter()
            .map(|(p, w)| w * self.values[&p])
            .sum();
        self.prefactor * acc
    }
}

/// Which change of variables represents the box covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxForm {
    /// `δλ^{2-β}` normalization, remainders controlled as `α → ∞`.
    SpatialForm,
    /// `δ^{3-β}` normalization, remainders controlled as `α → 0`.
    TemporalForm,
}

/// Raised when the chosen box form is evaluated outside its controlled regime.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RegimeWarning {
    pub form: BoxForm,
    pub alpha: f64,
    pub message: String,
}

pub fn box_regime_warning(design: &SamplingDesign, form: BoxForm) -> Option<RegimeWarning> {
    let alpha = design.alpha()?;
    let message = match form {
        BoxForm::TemporalForm if alpha > 1.0 => "temporal form used with alpha > 1",
        BoxForm::SpatialForm if alpha < 1.0 => "spatial form used with alpha < 1",
        _ => return None,
    };
    Some(RegimeWarning {
        form,
        alpha,
        message: message.to_string(),
    })
}

/// `cos(g·sf·s) sin⁴(sf·s/2) φ(pf·v) v^{β-d-2}`
struct BoxIntegrand {
    piece: Piece,
    g: f64,
    sf: f64,
    pf: f64,
    beta: f64,
    d: u32,
}

impl MixedIntegrand for BoxIntegrand {
    fn eval(&self, s: f64, v: f64) -> f64 {
        let x = self.sf * s;
        (self.g * x).cos()
            * (0.5 * x).sin().powi(4)
            * self.piece.eval(self.pf * v)
            * v.powf(self.beta - self.d as f64 - 2.0)
    }

    fn tail(&self, c: f64) -> TrigSeries {
        TrigSeries::cos(self.g * self.sf * c)
            .mul(&TrigSeries::sin4_half(self.sf * c))
            .mul(&self.piece.series(self.pf))
            .mul(&TrigSeries::power(self.beta - self.d as f64 - 2.0))
    }

    fn origin_exponent(&self) -> f64 {
        4.0 + self.piece.origin_exponent() + self.beta - self.d as f64 - 2.0
    }
}

fn box_weights(i: u64, j: u64) -> Vec<(Piece, f64)> {
    temporal_terms(i, j)
        .into_iter()
        .map(|(p, w)| (p, 16.0 * w))
        .collect()
}

/// Box covariance with the integrals cached by `(piece, spatial gap)`.
#[derive(Debug, Clone)]
pub struct BoxKernel {
    m: u64,
    n: u64,
    prefactor: f64,
    values: HashMap<(Piece, u64), f64>,
}

struct BoxScales {
    prefactor: f64,
    sf: f64,
    pf: f64,
}

fn box_scales(
    design: &SamplingDesign,
    params: &ModelParams,
    form: BoxForm,
) -> Result<(u64, u64, BoxScales)> {
    let SamplingDesign::Spacetime {
        lambda,
        delta,
        n,
        m,
    } = *design
    else {
        return Err(invalid("box covariance needs a spacetime design"));
    };
    let b = params.beta;
    let tw = (2.0 * PI).powi(params.d as i32);
    let eta = delta / lambda * params.vartheta.sqrt();
    let scales = match form {
        BoxForm::SpatialForm => BoxScales {
            prefactor: delta * lambda.powf(2.0 - b) / (tw * params.vartheta),
            sf: 1.0,
            pf: eta,
        },
        BoxForm::TemporalForm => BoxScales {
            prefactor: delta.powf(3.0 - b) / (tw * params.vartheta.powf(b / 2.0)),
            sf: 1.0 / eta,
            pf: 1.0,
        },
    };
    Ok((m as u64, n as u64, scales))
}

fn box_piece(
    piece: Piece,
    gk: u64,
    sc: &BoxScales,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if piece.is_zero() {
        return Ok(0.0);
    }
    let f = BoxIntegrand {
        piece,
        g: gk as f64,
        sf: sc.sf,
        pf: sc.pf,
        beta: params.beta,
        d: params.d,
    };
    Ok(full_space(params.d, &f, false, spec)?.value)
}

impl BoxKernel {
    pub fn new(
        design: &SamplingDesign,
        params: &ModelParams,
        spec: &QuadratureSpec,
        form: BoxForm,
    ) -> Result<Self> {
        let (m, n, sc) = box_scales(design, params, form)?;
        let mut pieces: Vec<Piece> = (1..=m)
            .flat_map(|i| {
                (i..=m).flat_map(move |j| temporal_terms(i, j).into_iter().map(|(p, _)| p))
            })
            .filter(|p| !p.is_zero())
            .collect();
        pieces.sort_unstable();
        pieces.dedup();
        let keys: Vec<(Piece, u64)> = pieces
            .iter()
            .flat_map(|&p| (0..n).map(move |g| (p, g)))
            .collect();
        let values = evaluate_all(&keys, |&(p, g)| box_piece(p, g, &sc, params, spec))?;
        Ok(Self {
            m,
            n,
            prefactor: sc.prefactor,
            values,
        })
    }

    /// Covariance of the box increments at time indices `i, j` and space indices `k, l` (1-based).
    pub fn cov(&self, i: u64, j: u64, k: u64, l: u64) -> f64 {
        assert!(
            (1..=self.m).contains(&i) && (1..=self.m).contains(&j),
            "time index outside 1..={}",
            self.m
        );
        assert!(
            (1..=self.n).contains(&k) && (1..=self.n).contains(&l),
            "space index outside 1..={}",
            self.n
        );
        let gk = k.abs_diff(l);
        let acc: f64 = box_weights(i, j)
            .into_iter()
            .map(|(p, w)| {
                if p.is_zero() {
                    0.0
                } else {
                    w * self.values[&(p, gk)]
                }
            })
            .sum();
        self.prefactor * acc
    }

    pub fn dims(&self) -> (u64, u64) {
        (self.m, self.n)
    }
}

/// `Cov` of box increments `(i, k)` and `(j, l)` in the requested representation.
pub fn cov_inc_box(
    (i, j, k, l): (u64, u64, u64, u64),
    design: &SamplingDesign,
    params: &ModelParams,
    spec: &QuadratureSpec,
    form: BoxForm,
) -> Result<f64> {
    let (m, n, sc) = box_scales(design, params, form)?;
    if !(1..=m).contains(&i)
        || !(1..=m).contains(&j)
        || !(1..=n).contains(&k)
        || !(1..=n).contains(&l)
    {
        return Err(invalid(format!(
            "box indices ({i},{j},{k},{l}) outside the {m}x{n} grid"
        )));
    }
    let gk = k.abs_diff(l);
    let mut acc = 0.0;
    for (p, w) in box_weights(i, j) {
        acc += w * box_piece(p, gk, &sc, params, spec)?;
    }
    Ok(sc.prefactor * acc)
}

fn evaluate_all<K, F>(keys: &[K], f: F) -> Result<HashMap<K, f64>>
where
    K: Copy + Eq + std::hash::Hash + Send + Sync,
    F: Fn(&K) -> Result<f64> + Sync,
{
    let vals: Vec<Result<f64>> = keys.par_iter().map(&f).collect();
    keys.iter()
        .zip(vals)
        .map(|(k, v)| v.map(|v| (*k, v)))
        .collect()
}
