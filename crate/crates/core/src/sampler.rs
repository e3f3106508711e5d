//! Exact Gaussian sampling from assembled covariances.
//!
//! Standard normals are produced by inverting the normal CDF (AS241) on
//! uniforms `((x >> 11) + 0.5)·2^{-53}` drawn from ChaCha20. Replicate `r` uses
//! stream `r` of the generator seeded by the user seed, so each replicate's
//! draw is independent of how many replicates are requested.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::covariance::{temporal_cov_u, Assembled, CovMatrix, DEFAULT_SIZE_CAP};
use crate::error::{invalid, Error, Result};
use crate::model::{ModelParams, SamplingDesign};
use crate::stats::normal_quantile;

/// Relative jitter levels tried after a plain factorization fails.
pub const JITTER_LEVELS: [f64; 5] = [1e-14, 1e-13, 1e-12, 1e-11, 1e-10];

/// Lower Cholesky factor, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CholFactor {
    pub dim: usize,
    pub lower: Vec<f64>,
    /// Absolute diagonal shift that was added.
    pub jitter_used: f64,
}

impl CholFactor {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// `L z`
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| dot(&self.lower[i * self.dim..i * self.dim + i + 1], &z[..=i]))
            .collect()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..n {
        s += a[k] * b[k];
    }
    s
}

/// Plain Cholesky with a diagonal shift; `Err((row, pivot))` on a non-positive pivot.
fn cholesky(a: &CovMatrix, shift: f64) -> std::result::Result<Vec<f64>, (usize, f64)> {
    let n = a.dim;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        let (done, rest) = l.split_at_mut(i * n);
        let row_i = &mut rest[..n];
        for j in 0..i {
            let row_j = &done[j * n..j * n + j];
            let s = a.get(i, j) - dot(&row_i[..j], row_j);
            row_i[j] = s / done[j * n + j];
        }
        let diag = a.get(i, i) + shift;
        let pivot = diag - dot(&row_i[..i], &row_i[..i]);
        if !(pivot > f64::EPSILON * diag.abs()) || !pivot.is_finite() {
            return Err((i, pivot));
        }
        row_i[i] = pivot.sqrt();
    }
    Ok(l)
}

/// Cholesky factor, escalating jitter `ε·trace/dim` through [`JITTER_LEVELS`] if needed.
pub fn factorize(cov: &CovMatrix) -> Result<CholFactor> {
    if cov.dim > DEFAULT_SIZE_CAP {
        return Err(Error::SizeCapExceeded {
            requested: cov.dim,
            cap: DEFAULT_SIZE_CAP,
        });
    }
    if cov.data.len() != cov.dim * cov.dim {
        return Err(Error::ShapeMismatch {
            expected: cov.dim * cov.dim,
            got: cov.data.len(),
        });
    }
    let scale = cov.trace() / cov.dim.max(1) as f64;
    let mut last = (0, 0.0, 0.0);
    for shift in std::iter::once(0.0).chain(JITTER_LEVELS.iter().map(|e| e * scale)) {
        match cholesky(cov, shift) {
            Ok(lower) => {
                return Ok(CholFactor {
                    dim: cov.dim,
                    lower,
                    jitter_used: shift,
                })
            }
            Err((row, pivot)) => last = (row, pivot, shift),
        }
    }
    Err(Error::NotPsd {
        row: last.0,
        pivot: last.1,
        jitter: last.2,
    })
}

pub fn factorize_assembled(cov: Assembled) -> Result<CholFactor> {
    factorize(&cov.into_dense())
}

/// Generator for replicate `replicate` of `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Uniform on `(0,1)` with 53 random bits, never 0 or 1.
#[inline]
pub fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn standard_normals(rng: &mut ChaCha20Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| normal_quantile(uniform(rng))).collect()
}

/// One draw of `N(0, LLᵀ)` for replicate `replicate`.
pub fn draw(factor: &CholFactor, seed: u64, replicate: u64) -> Vec<f64> {
    let mut rng = replicate_rng(seed, replicate);
    factor.apply(&standard_normals(&mut rng, factor.dim))
}

/// `count` independent draws, one row per replicate.
pub fn sample(factor: &CholFactor, seed: u64, count: usize) -> Vec<Vec<f64>> {
    (0..count as u64)
        .into_par_iter()
        .map(|r| draw(factor, seed, r))
        .collect()
}

/// Covariance of `u(t_1), …, u(t_{m+1})` at a fixed point.
pub fn temporal_path_cov(design: &SamplingDesign, params: &ModelParams) -> Result<CovMatrix> {
    let SamplingDesign::Temporal { delta, m } = *design else {
        return Err(invalid("temporal path sampling needs a temporal design"));
    };
    Ok(CovMatrix::from_fn(m + 1, "temporal_path", |i, j| {
        temporal_cov_u((i + 1) as f64 * delta, (j + 1) as f64 * delta, params)
    }))
}

/// Draws of `(u(t_0), …, u(t_{m+1}))` with `u(t_0) = 0`. Paths are generated at
/// `ϑ = 1` and scaled by `ϑ^{-β/4}`, so shared seeds give exactly scaled paths.
pub fn sample_temporal_u_path(
    design: &SamplingDesign,
    params: &ModelParams,
    seed: u64,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    design.validate()?;
    params.validate()?;
    let unit = params.with_vartheta(1.0);
    let factor = factorize(&temporal_path_cov(design, &unit)?)?;
    let s = params.vartheta.powf(-params.beta / 4.0);
    Ok(sample(&factor, seed, count)
        .into_iter()
        .map(|x| {
            std::iter::once(0.0)
                .chain(x.into_iter().map(|v| v * s))
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(dim: usize, data: &[f64]) -> CovMatrix {
        CovMatrix {
            dim,
            data: data.to_vec(),
            label: "t".into(),
        }
    }

    #[test]
    fn hand_factor() {
        let f = factorize(&mat(2, &[1.0, 1.0, 1.0, 4.0])).unwrap();
        assert_eq!(f.jitter_used, 0.0);
        assert_eq!(f.lower, vec![1.0, 0.0, 1.0, 3f64.sqrt()]);
    }

    #[test]
    fn rank_deficient_needs_jitter() {
        let f = factorize(&mat(2, &[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(f.jitter_used > 0.0);
    }

    #[test]
    fn indefinite_fails() {
        let e = factorize(&mat(2, &[1.0, 2.0, 2.0, 1.0])).unwrap_err();
        assert!(matches!(e, Error::NotPsd { row: 1, .. }));
    }

    #[test]
    fn streams_are_reproducible() {
        let f = factorize(&CovMatrix::identity(3)).unwrap();
        assert_eq!(sample(&f, 7, 4), sample(&f, 7, 4));
        assert_eq!(sample(&f, 7, 4)[3], sample(&f, 7, 9)[3]);
        assert_ne!(sample(&f, 7, 2)[0], sample(&f, 8, 2)[0]);
    }

    #[test]
    fn reconstructs_matrix() {
        let a = CovMatrix::from_fn(40, "t", |i, j| {
            let (x, y) = ((i + 1) as f64, (j + 1) as f64);
            x.min(y).powi(2) / 4.0
        });
        let f = factorize(&a).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let v = dot(&f.lower[i * 40..i * 40 + 40], &f.lower[j * 40..j * 40 + 40]);
                assert!((v - a.get(i, j)).abs() < 1e-10 * 400.0);
            }
        }
    }
}
