//! Process-level and increment-level covariances, and assembly of the
//! covariance of a whole increment vector.

mod increment;
pub mod kernels;
mod process;

pub use increment::{
    box_regime_warning, cov_inc_box, cov_inc_spatial, cov_inc_temporal, BoxForm, BoxKernel,
    RegimeWarning, TemporalKernel,
};
pub use kernels::Piece;
pub use process::{full_space, spatial_cov_u, temporal_cov_u, whitenoise_cov_u};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, SamplingDesign};
use crate::specfun::QuadratureSpec;

/// Largest increment vector the dense machinery accepts.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// First row `r_0..r_{n-1}` of a symmetric Toeplitz matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToeplitzRow {
    pub values: Vec<f64>,
}

impl ToeplitzRow {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self, label: impl Into<String>) -> CovMatrix {
        let n = self.dim();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.values[i.abs_diff(j)];
            }
        }
        CovMatrix {
            dim: n,
            data,
            label: label.into(),
        }
    }
}

/// Dense symmetric matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
    pub label: String,
}

impl CovMatrix {
    pub fn from_fn(dim: usize, label: impl Into<String>, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        CovMatrix {
            dim,
            data,
            label: label.into(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, "identity", |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|x| *x *= c);
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Covariance of the increment vector of a design.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "structure", rename_all = "snake_case")]
pub enum Assembled {
    Toeplitz(ToeplitzRow),
    Dense(CovMatrix),
}

impl Assembled {
    pub fn dim(&self) -> usize {
        match self {
            Assembled::Toeplitz(r) => r.dim(),
            Assembled::Dense(m) => m.dim,
        }
    }

    pub fn into_dense(self) -> CovMatrix {
        match self {
            Assembled::Toeplitz(r) => r.to_dense("spatial"),
            Assembled::Dense(m) => m,
        }
    }
}

/// Assemble the covariance of all increments of `design`. Box increments are
/// ordered time-major: index `(i-1)·n + (k-1)`.
pub fn assemble_cov(
    design: &SamplingDesign,
    params: &ModelParams,
    spec: &QuadratureSpec,
    form: BoxForm,
    cap: usize,
) -> Result<Assembled> {
    design.validate()?;
    params.validate()?;
    spec.validate()?;
    let dim = design.dim();
    if dim > cap {
        return Err(Error::SizeCapExceeded {
            requested: dim,
            cap,
        });
    }
    match *design {
        SamplingDesign::Spatial { n, .. } => {
            let values: Vec<Result<f64>> = (0..n as i64)
                .into_par_iter()
                .map(|g| cov_inc_spatial(g, design, params, spec))
                .collect();
            Ok(Assembled::Toeplitz(ToeplitzRow {
                values: values.into_iter().collect::<Result<_>>()?,
            }))
        }
        SamplingDesign::Temporal { delta, m } => {
            let kernel = TemporalKernel::new(m as u64, params, spec)?;
            let s = delta.powf(3.0 - params.beta);
            Ok(Assembled::Dense(CovMatrix::from_fn(
                m,
                "temporal",
                |i, j| s * kernel.cov(i as u64 + 1, j as u64 + 1),
            )))
        }
        SamplingDesign::Spacetime { n, .. } => {
            let kernel = BoxKernel::new(design, params, spec, form)?;
            let label = match form {
                BoxForm::SpatialForm => "box_spatial_form",
                BoxForm::TemporalForm => "box_temporal_form",
            };
            Ok(Assembled::Dense(CovMatrix::from_fn(dim, label, |a, b| {
                let (i, k) = ((a / n) as u64 + 1, (a % n) as u64 + 1);
                let (j, l) = ((b / n) as u64 + 1, (b % n) as u64 + 1);
                kernel.cov(i, j, k, l)
            })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::inc2_2d;

    fn wn() -> ModelParams {
        ModelParams::new(1.0, 1.0, 1).unwrap()
    }

    #[test]
    fn temporal_first_entry_is_one() {
        let v = cov_inc_temporal(1, 1, &wn(), &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn temporal_matches_differenced_process() {
        let spec = QuadratureSpec::default();
        let p = ModelParams::new(1.3, 0.5, 1).unwrap();
        let h = |a: f64, b: f64| temporal_cov_u(a, b, &p);
        for &(i, j) in &[(1u64, 1u64), (2, 1), (3, 5), (4, 4), (2, 7)] {
            let want = inc2_2d(h, i as f64, j as f64);
            let got = cov_inc_temporal(i, j, &p, &spec).unwrap();
            assert!(
                (got - want).abs() < 1e-8 * want.abs().max(1e-3),
                "({i},{j}): {got} vs {want}"
            );
        }
    }

    #[test]
    fn spatial_white_noise_band() {
        let spec = QuadratureSpec::default();
        let design = SamplingDesign::Spatial {
            t: 1.0,
            lambda: 0.01,
            n: 4,
        };
        let want = [0.01, -0.005, 0.0, 0.0];
        for (g, w) in want.iter().enumerate() {
            let v = cov_inc_spatial(g as i64, &design, &wn(), &spec).unwrap();
            assert!((v - w).abs() < 1e-8, "gap {g}: {v}");
        }
    }

    #[test]
    fn toeplitz_expands_symmetrically() {
        let m = ToeplitzRow {
            values: vec![3.0, 1.0, 0.5],
        }
        .to_dense("t");
        assert_eq!(m.get(0, 2), 0.5);
        assert_eq!(m.get(2, 1), 1.0);
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn size_cap_enforced() {
        let d = SamplingDesign::Temporal { delta: 1.0, m: 10 };
        let e = assemble_cov(
            &d,
            &wn(),
            &QuadratureSpec::default(),
            BoxForm::SpatialForm,
            5,
        )
        .unwrap_err();
        assert!(matches!(
            e,
            Error::SizeCapExceeded {
                requested: 10,
                cap: 5
            }
        ));
    }

    fn light_cone_box(i: u64, j: u64, k: u64, l: u64, delta: f64, lambda: f64, vt: f64) -> f64 {
        let h = |q: f64, z: f64| {
            inc2_2d(
                |a: f64, b: f64| whitenoise_cov_u(q * delta, a * lambda, z * delta, b * lambda, vt),
                k as f64,
                l as f64,
            )
        };
        inc2_2d(h, i as f64, j as f64)
    }

    #[test]
    fn box_matches_light_cone() {
        let spec = QuadratureSpec::default();
        for &(lambda, delta, vt) in &[(0.1, 1.0, 1.0), (1.0, 0.1, 1.0), (0.3, 0.4, 2.0)] {
            let design = SamplingDesign::Spacetime {
                lambda,
                delta,
                n: 3,
                m: 3,
            };
            let p = ModelParams::new(vt, 1.0, 1).unwrap();
            for form in [BoxForm::SpatialForm, BoxForm::TemporalForm] {
                let kernel = BoxKernel::new(&design, &p, &spec, form).unwrap();
                for (i, j, k, l) in [
                    (1, 1, 1, 1),
                    (1, 2, 1, 1),
                    (2, 3, 1, 3),
                    (3, 3, 2, 1),
                    (1, 3, 2, 2),
                ] {
                    let want = light_cone_box(i, j, k, l, delta, lambda, vt);
                    let got = kernel.cov(i, j, k, l);
                    let scale = light_cone_box(i, i, k, k, delta, lambda, vt);
                    assert!(
                        (got - want).abs() < 1e-8 * scale,
                        "{form:?} {lambda} {delta} ({i},{j},{k},{l}): {got} vs {want}"
                    );
                }
            }
        }
    }
}
