//! Variation statistics, moment estimators with plug-in confidence intervals,
//! the white-noise maximum likelihood estimator and the Hellinger distance.

use serde::{Deserialize, Serialize};

use crate::covariance::CovMatrix;
use crate::error::{invalid, Error, Result};
use crate::model::{NoiseProfile, SamplingDesign};
use crate::sampler::{factorize, CholFactor};
use crate::specfun::ConstantsTable;
use crate::stats::normal_quantile;

/// `x_{k+1} + x_{k-1} - 2x_k` for interior `k`.
pub fn second_diff(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 3 {
        return Err(Error::TooShort {
            need: 3,
            got: series.len(),
        });
    }
    Ok(series
        .windows(3)
        .map(|w| w[2] + w[0] - 2.0 * w[1])
        .collect())
}

/// Box increments of a `(m+2) × (n+2)` grid (rows are times, columns are
/// locations), returned time-major as an `m × n` block.
pub fn box_diff(grid: &[Vec<f64>]) -> Result<Vec<f64>> {
    if grid.len() < 3 {
        return Err(Error::TooShort {
            need: 3,
            got: grid.len(),
        });
    }
    let cols = grid[0].len();
    if cols < 3 {
        return Err(Error::TooShort { need: 3, got: cols });
    }
    if let Some(bad) = grid.iter().find(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch {
            expected: cols,
            got: bad.len(),
        });
    }
    let spatial: Vec<Vec<f64>> = grid.iter().map(|r| second_diff(r)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity((grid.len() - 2) * (cols - 2));
    for w in spatial.windows(3) {
        out.extend((0..cols - 2).map(|k| w[2][k] + w[0][k] - 2.0 * w[1][k]));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationKind {
    Sp,
    Te,
    BoxSp,
    BoxTe,
}

impl VariationKind {
    pub fn name(self) -> &'static str {
        match self {
            VariationKind::Sp => "sp",
            VariationKind::Te => "te",
            VariationKind::BoxSp => "box_sp",
            VariationKind::BoxTe => "box_te",
        }
    }

    /// Whether the estimator inverts through the power `2/β`.
    fn temporal_scaling(self) -> bool {
        matches!(self, VariationKind::Te | VariationKind::BoxTe)
    }

    /// Limit expectation and variance constants of the rescaled statistic at `ϑ = 1`
    /// (the spatial kind's `t` excluded).
    pub fn constants(self, c: &ConstantsTable) -> (f64, f64) {
        match self {
            VariationKind::Sp => (c.c_sp_e, c.c_sp_v),
            VariationKind::Te => (c.c_te_e, c.c_te_v),
            VariationKind::BoxSp => (c.c_box_sp_e, c.c_box_sp_v),
            VariationKind::BoxTe => (c.c_box_te_e, c.c_box_te_v),
        }
    }

    fn check_design(self, design: &SamplingDesign) -> Result<()> {
        let ok = matches!(
            (self, design),
            (VariationKind::Sp, SamplingDesign::Spatial { .. })
                | (VariationKind::Te, SamplingDesign::Temporal { .. })
                | (
                    VariationKind::BoxSp | VariationKind::BoxTe,
                    SamplingDesign::Spacetime { .. }
                )
        );
        if ok {
            Ok(())
        } else {
            Err(invalid(format!(
                "variation kind {} does not match the design",
                self.name()
            )))
        }
    }

    /// Multiplier taking `V` to the rescaled statistic.
    pub fn normalization(self, design: &SamplingDesign, profile: NoiseProfile) -> Result<f64> {
        self.check_design(design)?;
        let b = profile.beta;
        Ok(match (self, *design) {
            (VariationKind::Sp, SamplingDesign::Spatial { lambda, n, .. }) => {
                lambda.powf(b - 2.0) / n as f64
            }
            (VariationKind::Te, SamplingDesign::Temporal { delta, m }) => {
                delta.powf(b - 3.0) / (m * m) as f64
            }
            (
                VariationKind::BoxSp,
                SamplingDesign::Spacetime {
                    lambda,
                    delta,
                    n,
                    m,
                },
            ) => lambda.powf(b - 2.0) / (delta * (n * m * m) as f64),
            (VariationKind::BoxTe, SamplingDesign::Spacetime { delta, n, m, .. }) => {
                delta.powf(b - 3.0) / (n * m * m) as f64
            }
            _ => unreachable!("checked above"),
        })
    }

    /// `√n`, `√m` or `√(nm)`.
    pub fn rate(self, design: &SamplingDesign) -> f64 {
        (design.dim() as f64).sqrt()
    }

    /// Limit of the rescaled statistic at wave speed `ϑ`.
    pub fn target(self, constants: &ConstantsTable, design: &SamplingDesign, vartheta: f64) -> f64 {
        let (e, _) = self.constants(constants);
        let t = spatial_time(design);
        if self.temporal_scaling() {
            e / vartheta.powf(constants.beta / 2.0)
        } else {
            t * e / vartheta
        }
    }

    /// Limit variance of `rate·(rescaled - target)` at wave speed `ϑ`.
    pub fn target_variance(
        self,
        constants: &ConstantsTable,
        design: &SamplingDesign,
        vartheta: f64,
    ) -> f64 {
        let (_, v) = self.constants(constants);
        let t = spatial_time(design);
        if self.temporal_scaling() {
            v / vartheta.powf(constants.beta)
        } else {
            t * t * v / (vartheta * vartheta)
        }
    }
}

fn spatial_time(design: &SamplingDesign) -> f64 {
    match *design {
        SamplingDesign::Spatial { t, .. } => t,
        _ => 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationResult {
    pub kind: VariationKind,
    pub raw: f64,
    pub rescaled: f64,
}

/// Realized variation of a vector of increments.
pub fn variation(
    kind: VariationKind,
    increments: &[f64],
    design: &SamplingDesign,
    profile: NoiseProfile,
) -> Result<VariationResult> {
    let norm = kind.normalization(design, profile)?;
    if increments.len() != design.dim() {
        return Err(Error::ShapeMismatch {
            expected: design.dim(),
            got: increments.len(),
        });
    }
    let sq: Vec<f64> = increments.iter().map(|x| x * x).collect();
    let raw = crate::stats::pairwise_sum(&sq);
    Ok(VariationResult {
        kind,
        raw,
        rescaled: raw * norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub kind: VariationKind,
    pub estimate: f64,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    pub rate_factor: f64,
    /// Plug-in asymptotic standard deviation of the estimate.
    pub std_error: f64,
}

impl EstimateWithCI {
    pub fn covers(&self, vartheta: f64) -> bool {
        self.lower <= vartheta && vartheta <= self.upper
    }
}

/// Moment estimator of `ϑ` and its asymptotic `level` interval.
pub fn estimate(
    result: &VariationResult,
    constants: &ConstantsTable,
    design: &SamplingDesign,
    level: f64,
) -> Result<EstimateWithCI> {
    let kind = result.kind;
    kind.check_design(design)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if !(result.rescaled > 0.0) || !result.rescaled.is_finite() {
        return Err(Error::NonPositiveVariation(result.rescaled));
    }
    let (e, v) = kind.constants(constants);
    let t = spatial_time(design);
    let (est, c) = if kind.temporal_scaling() {
        let b = constants.beta;
        ((e / result.rescaled).powf(2.0 / b), 2.0 / b * v.sqrt() / e)
    } else {
        (t * e / result.rescaled, v.sqrt() / e)
    };
    let rate = kind.rate(design);
    let std_error = est * c / rate;
    let half = std_error * normal_quantile(0.5 + level / 2.0);
    Ok(EstimateWithCI {
        kind,
        estimate: est,
        level,
        lower: est - half,
        upper: est + half,
        rate_factor: rate,
        std_error,
    })
}

/// Outcome of the white-noise maximum likelihood estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub estimate: f64,
    /// `Uᵀ A⁻¹ U` by a direct solve.
    pub q_direct: f64,
    /// Tridiagonal weighted-sum form of the same quadratic form.
    pub q_weighted: f64,
    /// `u(t_m)²/(2m+1)`, the boundary term by which the two differ.
    pub boundary_term: f64,
}

/// Factor of `A_m = [(i∧j)²]`, reusable across paths of the same length.
#[derive(Debug, Clone)]
pub struct MleSolver {
    factor: CholFactor,
}

impl MleSolver {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::TooShort { need: 1, got: 0 });
        }
        let a = CovMatrix::from_fn(m, "mle", |i, j| {
            let k = (i.min(j) + 1) as f64;
            k * k
        });
        match factorize(&a) {
            Ok(f) if f.jitter_used == 0.0 => Ok(Self { factor: f }),
            Ok(_) => Err(Error::SingularSystem(m)),
            Err(Error::NotPsd { row, .. }) => Err(Error::SingularSystem(row)),
            Err(e) => Err(e),
        }
    }

    /// `Uᵀ A⁻¹ U = ‖L⁻¹U‖²`.
    pub fn quadratic_form(&self, u: &[f64]) -> Result<f64> {
        let m = self.factor.dim;
        if u.len() != m {
            return Err(Error::ShapeMismatch {
                expected: m,
                got: u.len(),
            });
        }
        let mut y = vec![0.0; m];
        for i in 0..m {
            let row = &self.factor.lower[i * m..i * m + i];
            let s: f64 = row.iter().zip(&y).map(|(a, b)| a * b).sum();
            y[i] = (u[i] - s) / self.factor.get(i, i);
        }
        Ok(y.iter().map(|v| v * v).sum())
    }

    pub fn estimate(&self, u: &[f64], delta: f64) -> Result<MleResult> {
        let q = self.quadratic_form(u)?;
        let m = u.len();
        let (q_weighted, boundary_term) = weighted_quadratic_variation(u);
        if !(q > 0.0) {
            return Err(Error::NonPositiveVariation(q));
        }
        let root = delta * delta * m as f64 / (4.0 * q);
        Ok(MleResult {
            estimate: root * root,
            q_direct: q,
            q_weighted,
            boundary_term,
        })
    }
}

/// `u_1² + Σ_{j<m} (u_{j+1} - u_j)²/(2j+1) + u_m²/(2m+1)` and its last term.
pub fn weighted_quadratic_variation(u: &[f64]) -> (f64, f64) {
    let m = u.len();
    if m == 0 {
        return (0.0, 0.0);
    }
    let mut q = u[0] * u[0];
    for j in 1..m {
        let d = u[j] - u[j - 1];
        q += d * d / (2 * j + 1) as f64;
    }
    let boundary = u[m - 1] * u[m - 1] / (2 * m + 1) as f64;
    (q + boundary, boundary)
}

/// MLE of `ϑ` from `u(t_1), …, u(t_m)` under space-time white noise.
pub fn mle_whitenoise(u_path: &[f64], delta: f64) -> Result<MleResult> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    MleSolver::new(u_path.len())?.estimate(u_path, delta)
}

/// Squared Hellinger distance between the laws of the first `m` temporal
/// increments under `ϑ₀` and `ϑ₁`.
pub fn hellinger_sq(theta0: f64, theta1: f64, beta: f64, m: u64) -> Result<f64> {
    if !(theta0 > 0.0 && theta1 > 0.0) {
        return Err(invalid("wave speeds must be positive"));
    }
    let (a, b) = (theta0.powf(beta / 2.0), theta1.powf(beta / 2.0));
    let r = ((a - b) / (a + b)).powi(2);
    Ok(1.0 - (1.0 - r).powf((m as f64 + 2.0) / 4.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_diff_hand_cases() {
        assert_eq!(second_diff(&[0.0, 1.0, 4.0, 9.0]).unwrap(), vec![2.0, 2.0]);
        assert!(second_diff(&[2.0, 5.0, 8.0, 11.0])
            .unwrap()
            .iter()
            .all(|&x| x == 0.0));
        assert!(matches!(
            second_diff(&[1.0, 2.0]),
            Err(Error::TooShort { need: 3, got: 2 })
        ));
    }

    #[test]
    fn box_diff_order_is_irrelevant() {
        let grid: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                (0..4)
                    .map(|k| ((i * 7 + k * 3) % 11) as f64 + 0.1 * (i * k) as f64)
                    .collect()
            })
            .collect();
        let a = box_diff(&grid).unwrap();
        // time first, then space
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|k| second_diff(&grid.iter().map(|r| r[k]).collect::<Vec<_>>()).unwrap())
            .collect();
        let mut b = Vec::new();
        for i in 0..3 {
            b.extend(second_diff(&cols.iter().map(|c| c[i]).collect::<Vec<_>>()).unwrap());
        }
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn mle_hand_case() {
        let r = mle_whitenoise(&[1.0, 2.0], 1.0).unwrap();
        assert!((r.q_direct - 4.0 / 3.0).abs() < 1e-14);
        assert!((r.q_weighted - r.q_direct - 4.0 / 5.0).abs() < 1e-14);
        assert!((r.boundary_term - 4.0 / 5.0).abs() < 1e-15);
        let r2 = mle_whitenoise(&[2.0, 4.0], 1.0).unwrap();
        assert!((r2.estimate - r.estimate / 16.0).abs() < 1e-14 * r.estimate);
    }

    #[test]
    fn hellinger_values() {
        assert_eq!(hellinger_sq(2.0, 2.0, 1.3, 10).unwrap(), 0.0);
        // ϑ^{β/2} = 1 and 2: ratio (1-2)²/(1+2)²
        assert!((hellinger_sq(1.0, 4.0, 1.0, 2).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        let mut prev = 0.0;
        for m in 0..50 {
            let h = hellinger_sq(1.0, 1.5, 1.0, m).unwrap();
            assert!(h >= prev);
            prev = h;
        }
    }
}
