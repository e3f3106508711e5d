//! Seeded Monte Carlo experiments for the central limit theorems, interval
//! coverage and the space-time regime sweep.
//!
//! Each replicate `r` draws its increment vector from stream `r` of the
//! configured seed, and all aggregates are summed pairwise in replicate order,
//! so reports are bit-identical across reruns and thread counts.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::{assemble_cov, box_regime_warning, BoxForm, CovMatrix, DEFAULT_SIZE_CAP};
use crate::error::{invalid, Error, Result};
use crate::inference::{estimate, EstimateWithCI, VariationKind, VariationResult};
use crate::model::{ModelParams, SamplingDesign};
use crate::sampler::{draw, factorize};
use crate::specfun::constants::DEFAULT_SERIES_CAP;
use crate::specfun::{constants_table, ConstantsTable, QuadratureSpec};
use crate::stats::{ks_standardized, mean, qq_points, variance};

/// Limits used to test the asymptotic sampling assumptions at finite size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssumptionThresholds {
    /// Upper bound for `λ n^{1/4}` (spatial kind).
    pub lambda_n_quarter: f64,
    /// Upper bound for `n/m` (space-time kinds).
    pub n_over_m: f64,
    /// Lower bound for `α/(nm)^{1/4}` when `α ≥ 1`, and for `1/(α (nm)^{1/4})` when `α < 1`.
    pub alpha_separation: f64,
}

impl Default for AssumptionThresholds {
    fn default() -> Self {
        Self {
            lambda_n_quarter: 1.0,
            n_over_m: 0.1,
            alpha_separation: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `true` when `value ≤ bound` is required, `false` for `value ≥ bound`.
    pub upper: bool,
    pub satisfied: bool,
}

impl AssumptionCheck {
    fn new(name: &str, value: f64, bound: f64, upper: bool) -> Self {
        let satisfied = if upper {
            value <= bound
        } else {
            value >= bound
        };
        Self {
            name: name.to_string(),
            value,
            bound,
            upper,
            satisfied,
        }
    }

    fn describe(&self) -> String {
        let op = if self.upper { "<=" } else { ">=" };
        format!("{}: {} {op} {} fails", self.name, self.value, self.bound)
    }
}

/// Finite-size versions of the sampling assumptions for `design`, using the simulation `ϑ`.
pub fn check_assumptions(
    design: &SamplingDesign,
    params: &ModelParams,
    thresholds: &AssumptionThresholds,
) -> Vec<AssumptionCheck> {
    match *design {
        SamplingDesign::Spatial { lambda, n, .. } => {
            vec![AssumptionCheck::new(
                "lambda*n^(1/4)",
                lambda * (n as f64).powf(0.25),
                thresholds.lambda_n_quarter,
                true,
            )]
        }
        SamplingDesign::Temporal { .. } => Vec::new(),
        SamplingDesign::Spacetime {
            lambda,
            delta,
            n,
            m,
        } => {
            let alpha = delta / lambda;
            let nm4 = ((n * m) as f64).powf(0.25);
            let mut out = vec![AssumptionCheck::new(
                "n/m",
                n as f64 / m as f64,
                thresholds.n_over_m,
                true,
            )];
            let spatial = alpha >= 1.0;
            if spatial {
                out.push(AssumptionCheck::new(
                    "alpha/(nm)^(1/4)",
                    alpha / nm4,
                    thresholds.alpha_separation,
                    false,
                ));
            } else {
                out.push(AssumptionCheck::new(
                    "1/(alpha*(nm)^(1/4))",
                    1.0 / (alpha * nm4),
                    thresholds.alpha_separation,
                    false,
                ));
            }
            if params.d == 1 {
                let s = params.vartheta.sqrt();
                if spatial {
                    out.push(AssumptionCheck::new(
                        "sqrt(vartheta)*alpha/2 - n",
                        s * alpha / 2.0 - n as f64,
                        0.0,
                        false,
                    ));
                } else {
                    out.push(AssumptionCheck::new(
                        "1/(2*sqrt(vartheta)*alpha) - m",
                        1.0 / (2.0 * s * alpha) - m as f64,
                        0.0,
                        false,
                    ));
                }
            }
            out
        }
    }
}

fn default_level() -> f64 {
    0.95
}

fn default_series_cap() -> usize {
    DEFAULT_SERIES_CAP
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: VariationKind,
    pub design: SamplingDesign,
    pub params: ModelParams,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_series_cap")]
    pub series_cap: usize,
    #[serde(default)]
    pub thresholds: AssumptionThresholds,
    #[serde(default = "default_true")]
    pub enforce_assumptions: bool,
}

impl ExperimentConfig {
    pub fn new(
        kind: VariationKind,
        design: SamplingDesign,
        params: ModelParams,
        replicates: usize,
        seed: u64,
    ) -> Self {
        Self {
            kind,
            design,
            params,
            replicates,
            seed,
            level: default_level(),
            quadrature: QuadratureSpec::default(),
            series_cap: DEFAULT_SERIES_CAP,
            thresholds: AssumptionThresholds::default(),
            enforce_assumptions: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        self.params.validate()?;
        self.quadrature.validate()?;
        if self.replicates < 2 {
            return Err(invalid(format!(
                "need at least 2 replicates, got {}",
                self.replicates
            )));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(invalid(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        if self.design.dim() > DEFAULT_SIZE_CAP {
            return Err(Error::SizeCapExceeded {
                requested: self.design.dim(),
                cap: DEFAULT_SIZE_CAP,
            });
        }
        // validates the kind/design pairing
        self.kind
            .normalization(&self.design, self.params.profile())?;
        Ok(())
    }
}

/// Summary of one rescaled statistic over all replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub kind: VariationKind,
    pub empirical_mean: f64,
    /// `sd/√R` of the rescaled statistic.
    pub mc_standard_error: f64,
    /// Asymptotic limit of the rescaled statistic.
    pub target_mean: f64,
    /// Exact finite-sample expectation, from the trace of the covariance.
    pub exact_mean: f64,
    /// `(empirical_mean - target_mean)/mc_standard_error`.
    pub z_score: f64,
    /// Sample variance of `rate·(statistic - target)`.
    pub empirical_variance: f64,
    pub target_variance: f64,
    /// Exact finite-sample variance of `rate·statistic`, `2‖Σ‖²_F` scaled.
    pub exact_variance: f64,
    pub ks_distance: f64,
    /// Asymptotic 5% critical value `1.36/√R`.
    pub ks_critical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub config: ExperimentConfig,
    pub constants: ConstantsTable,
    pub summary: StatSummary,
    pub coverage: f64,
    pub mean_estimate: f64,
    pub jitter_used: f64,
    pub assumptions: Vec<AssumptionCheck>,
    pub warnings: Vec<String>,
    /// Rescaled statistic of every replicate.
    pub statistics: Vec<f64>,
    pub estimates: Vec<EstimateWithCI>,
    #[serde(skip)]
    pub runtime_seconds: f64,
}

/// Box covariance representation suited to the design's `α`.
fn preferred_form(design: &SamplingDesign) -> BoxForm {
    match design.alpha() {
        Some(a) if a < 1.0 => BoxForm::TemporalForm,
        _ => BoxForm::SpatialForm,
    }
}

struct Simulation {
    cov: CovMatrix,
    jitter: f64,
    /// Raw variations `V` per replicate.
    raw: Vec<f64>,
}

fn simulate(cfg: &ExperimentConfig) -> Result<Simulation> {
    let cov = assemble_cov(
        &cfg.design,
        &cfg.params,
        &cfg.quadrature,
        preferred_form(&cfg.design),
        DEFAULT_SIZE_CAP,
    )?
    .into_dense();
    let factor = factorize(&cov)?;
    let raw: Vec<f64> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let x = draw(&factor, cfg.seed, r);
            let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
            crate::stats::pairwise_sum(&sq)
        })
        .collect();
    Ok(Simulation {
        cov,
        jitter: factor.jitter_used,
        raw,
    })
}

fn summarize(
    kind: VariationKind,
    sim: &Simulation,
    cfg: &ExperimentConfig,
    constants: &ConstantsTable,
) -> Result<(StatSummary, Vec<f64>)> {
    let norm = kind.normalization(&cfg.design, cfg.params.profile())?;
    let stats: Vec<f64> = sim.raw.iter().map(|v| v * norm).collect();
    let rate = kind.rate(&cfg.design);
    let target = kind.target(constants, &cfg.design, cfg.params.vartheta);
    let r = stats.len() as f64;
    let emp_mean = mean(&stats);
    let mc_se = (variance(&stats) / r).sqrt();
    let summary = StatSummary {
        kind,
        empirical_mean: emp_mean,
        mc_standard_error: mc_se,
        target_mean: target,
        exact_mean: norm * sim.cov.trace(),
        z_score: (emp_mean - target) / mc_se,
        empirical_variance: rate * rate * variance(&stats),
        target_variance: kind.target_variance(constants, &cfg.design, cfg.params.vartheta),
        exact_variance: rate * rate * norm * norm * 2.0 * sim.cov.frobenius_sq(),
        ks_distance: ks_standardized(&stats),
        ks_critical: 1.36 / r.sqrt(),
    };
    Ok((summary, stats))
}

fn assumption_gate(cfg: &ExperimentConfig) -> Result<(Vec<AssumptionCheck>, Vec<String>)> {
    let checks = check_assumptions(&cfg.design, &cfg.params, &cfg.thresholds);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.satisfied)
        .map(AssumptionCheck::describe)
        .collect();
    if cfg.enforce_assumptions && !failed.is_empty() {
        return Err(Error::AssumptionViolated(failed.join("; ")));
    }
    let mut warnings = failed;
    if let Some(w) = box_regime_warning(&cfg.design, preferred_form(&cfg.design)) {
        warnings.push(w.message);
    }
    Ok((checks, warnings))
}

/// Simulate, rescale, estimate and compare against the asymptotic constants.
pub fn run_clt_experiment(cfg: &ExperimentConfig) -> Result<MCReport> {
    let start = Instant::now();
    cfg.validate()?;
    let (assumptions, warnings) = assumption_gate(cfg)?;
    let constants = constants_table(cfg.params.profile(), &cfg.quadrature, cfg.series_cap)?;
    let sim = simulate(cfg)?;
    let (summary, statistics) = summarize(cfg.kind, &sim, cfg, &constants)?;
    let estimates: Vec<EstimateWithCI> = statistics
        .iter()
        .zip(&sim.raw)
        .map(|(&rescaled, &raw)| {
            let v = VariationResult {
                kind: cfg.kind,
                raw,
                rescaled,
            };
            estimate(&v, &constants, &cfg.design, cfg.level)
        })
        .collect::<Result<_>>()?;
    let covered: Vec<f64> = estimates
        .iter()
        .map(|e| {
            if e.covers(cfg.params.vartheta) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let est_values: Vec<f64> = estimates.iter().map(|e| e.estimate).collect();
    Ok(MCReport {
        config: cfg.clone(),
        constants,
        summary,
        coverage: mean(&covered),
        mean_estimate: mean(&est_values),
        jitter_used: sim.jitter,
        assumptions,
        warnings,
        statistics,
        estimates,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Fraction of replicates whose plug-in interval covers the true `ϑ`.
pub fn run_coverage_experiment(cfg: &ExperimentConfig) -> Result<MCReport> {
    run_clt_experiment(cfg)
}

/// An `α` schedule at fixed `(n, m, λ)`; `δ = αλ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub alphas: Vec<f64>,
    pub params: ModelParams,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_series_cap")]
    pub series_cap: usize,
    #[serde(default)]
    pub thresholds: AssumptionThresholds,
    #[serde(default = "default_true")]
    pub enforce_assumptions: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub design: SamplingDesign,
    /// `"spatial"` for `α ≥ 1`, `"temporal"` otherwise.
    pub regime: String,
    pub spatial_form: StatSummary,
    pub temporal_form: StatSummary,
    /// Ratio of the spatial to the temporal normalization.
    pub normalization_ratio: f64,
    /// `α^{2-β}`
    pub expected_ratio: f64,
    pub ratio_relative_error: f64,
    pub jitter_used: f64,
    pub assumptions: Vec<AssumptionCheck>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub constants: ConstantsTable,
    pub points: Vec<SweepPoint>,
    #[serde(skip)]
    pub runtime_seconds: f64,
}

/// Evaluate both box normalizations at every `α` of the schedule.
pub fn run_regime_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let start = Instant::now();
    if cfg.alphas.is_empty() {
        return Err(invalid("alpha schedule is empty"));
    }
    let constants = constants_table(cfg.params.profile(), &cfg.quadrature, cfg.series_cap)?;
    let mut points = Vec::with_capacity(cfg.alphas.len());
    for &alpha in &cfg.alphas {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        let design = SamplingDesign::Spacetime {
            lambda: cfg.lambda,
            delta: alpha * cfg.lambda,
            n: cfg.n,
            m: cfg.m,
        };
        let kind = if alpha >= 1.0 {
            VariationKind::BoxSp
        } else {
            VariationKind::BoxTe
        };
        let exp = ExperimentConfig {
            kind,
            design,
            params: cfg.params,
            replicates: cfg.replicates,
            seed: cfg.seed,
            level: default_level(),
            quadrature: cfg.quadrature,
            series_cap: cfg.series_cap,
            thresholds: cfg.thresholds,
            enforce_assumptions: cfg.enforce_assumptions,
        };
        exp.validate()?;
        let (assumptions, warnings) = assumption_gate(&exp)?;
        let sim = simulate(&exp)?;
        let (spatial_form, _) = summarize(VariationKind::BoxSp, &sim, &exp, &constants)?;
        let (temporal_form, _) = summarize(VariationKind::BoxTe, &sim, &exp, &constants)?;
        let profile = cfg.params.profile();
        let ratio = VariationKind::BoxSp.normalization(&design, profile)?
            / VariationKind::BoxTe.normalization(&design, profile)?;
        let expected = alpha.powf(2.0 - cfg.params.beta);
        points.push(SweepPoint {
            alpha,
            design,
            regime: if alpha >= 1.0 { "spatial" } else { "temporal" }.to_string(),
            spatial_form,
            temporal_form,
            normalization_ratio: ratio,
            expected_ratio: expected,
            ratio_relative_error: ((ratio - expected) / expected).abs(),
            jitter_used: sim.jitter,
            assumptions,
            warnings,
        });
    }
    Ok(SweepReport {
        config: cfg.clone(),
        constants,
        points,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Float formatting for CSV outputs (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Per-replicate statistics and estimates.
pub fn write_replicates_csv(report: &MCReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "replicate",
        "rescaled",
        "estimate",
        "lower",
        "upper",
        "covered",
    ])?;
    for (r, (s, e)) in report.statistics.iter().zip(&report.estimates).enumerate() {
        w.write_record([
            r.to_string(),
            fmt_f64(*s),
            fmt_f64(e.estimate),
            fmt_f64(e.lower),
            fmt_f64(e.upper),
            u8::from(e.covers(report.config.params.vartheta)).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sorted standardized statistics against normal quantiles.
pub fn write_qq_csv(statistics: &[f64], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["normal_quantile", "standardized"])?;
    for (q, z) in qq_points(statistics) {
        w.write_record([fmt_f64(q), fmt_f64(z)])?;
    }
    w.flush()?;
    Ok(())
}

/// `report.json`, `replicates.csv` and `qq.csv` in `dir`.
pub fn write_report_files(report: &MCReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_json(report, &dir.join("report.json"))?;
    write_replicates_csv(report, &dir.join("replicates.csv"))?;
    write_qq_csv(&report.statistics, &dir.join("qq.csv"))
}
