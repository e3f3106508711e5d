//! Command-line front end. Exit codes: 0 success, 1 invalid input, 2 numerical failure.

mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use selftest::{run_selftest, SelfCheck, SelftestReport};

use crate::covariance::{assemble_cov, Assembled, BoxForm, DEFAULT_SIZE_CAP};
use crate::error::{invalid, Error, Result};
use crate::harness::{
    fmt_f64, run_clt_experiment, run_coverage_experiment, run_regime_sweep, write_json,
    write_report_files, ExperimentConfig, SweepConfig,
};
use crate::inference::{box_diff, estimate, second_diff, variation, MleSolver, VariationKind};
use crate::model::{ModelParams, NoiseProfile, SamplingDesign};
use crate::sampler::{factorize, sample, sample_temporal_u_path};
use crate::specfun::{constants_table, QuadratureSpec};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "WAVESPEED_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "wavespeed",
    version,
    about = "Wave-speed estimation for the stochastic wave equation with Riesz noise"
)]
struct Cli {
    /// Worker threads (default: $WAVESPEED_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic expectation and variance constants.
    Constants(ConstantsArgs),
    /// Covariance of the increment vector of a design, as CSV.
    Cov(CovArgs),
    /// Draw increment vectors (or temporal paths) as CSV rows.
    Simulate(SimulateArgs),
    /// Estimate the wave speed from observed increments.
    Estimate(EstimateArgs),
    /// Monte Carlo check of a central limit theorem.
    Clt(ExperimentArgs),
    /// Monte Carlo coverage of the plug-in confidence intervals.
    Coverage(ExperimentArgs),
    /// Space-time regime sweep over an alpha schedule.
    Sweep(ExperimentArgs),
    /// Built-in oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct QuadArgs {
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = QuadratureSpec::default().rel_tol)]
    rel_tol: f64,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = QuadratureSpec::default().abs_tol)]
    abs_tol: f64,
}

impl QuadArgs {
    fn spec(&self) -> Result<QuadratureSpec> {
        let s = QuadratureSpec::default().with_tolerance(self.rel_tol, self.abs_tol);
        s.validate()?;
        Ok(s)
    }
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    d: u32,
    /// Largest |k| kept in the variance series.
    #[arg(long, default_value_t = crate::specfun::constants::DEFAULT_SERIES_CAP)]
    series_cap: usize,
    /// JSON instead of `name value` lines.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormArg {
    Spatial,
    Temporal,
}

impl From<FormArg> for BoxForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Spatial => BoxForm::SpatialForm,
            FormArg::Temporal => BoxForm::TemporalForm,
        }
    }
}

#[derive(Args, Debug)]
struct CovArgs {
    /// Design JSON file.
    #[arg(long)]
    design: PathBuf,
    /// Model parameter JSON file.
    #[arg(long)]
    params: PathBuf,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Box covariance representation (default: by alpha).
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    /// Write the full matrix even for Toeplitz designs.
    #[arg(long)]
    dense: bool,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Temporal designs only: draw u(t_0..t_{m+1}) instead of increments.
    #[arg(long)]
    paths: bool,
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Sp,
    Te,
    BoxSp,
    BoxTe,
    Mle,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// CSV with one observation vector per row; a non-numeric first row is a header.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Rows hold raw observations (differenced before use) rather than increments.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = crate::specfun::constants::DEFAULT_SERIES_CAP)]
    series_cap: usize,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the report files.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 20240601)]
    seed: u64,
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    let n =
        match threads {
            Some(n) => Some(n),
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => Some(v.trim().parse().map_err(|_| {
                    invalid(format!("{THREADS_ENV} must be an integer, got {v:?}"))
                })?),
                Err(_) => None,
            },
        };
    if let Some(n) = n {
        if n == 0 {
            return Err(invalid("thread count must be at least 1"));
        }
        // a pool that is already initialised (repeated in-process calls) is kept
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn load_inputs(design: &Path, params: &Path) -> Result<(SamplingDesign, ModelParams)> {
    let d: SamplingDesign = read_json(design)?;
    let p: ModelParams = read_json(params)?;
    d.validate()?;
    p.validate()?;
    Ok((d, p))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_rows(
    out: Box<dyn Write>,
    header: &[String],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x)))?;
    }
    w.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn default_form(design: &SamplingDesign) -> BoxForm {
    match design.alpha() {
        Some(a) if a < 1.0 => BoxForm::TemporalForm,
        _ => BoxForm::SpatialForm,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Constants(a) => {
            let table = constants_table(
                NoiseProfile::new(a.beta, a.d)?,
                &a.quad.spec()?,
                a.series_cap,
            )?;
            if a.json {
                print_json(&table)?;
            } else {
                let v = serde_json::to_value(table)?;
                let mut out = std::io::stdout().lock();
                for (k, val) in v.as_object().into_iter().flatten() {
                    writeln!(out, "{k} {val}")?;
                }
            }
        }
        Command::Cov(a) => {
            let (design, params) = load_inputs(&a.design, &a.params)?;
            let form = a
                .form
                .map(BoxForm::from)
                .unwrap_or_else(|| default_form(&design));
            if let Some(w) = crate::covariance::box_regime_warning(&design, form) {
                eprintln!("warning: {}", w.message);
            }
            let cov = assemble_cov(&design, &params, &a.quad.spec()?, form, DEFAULT_SIZE_CAP)?;
            let out = output(&a.out)?;
            match cov {
                Assembled::Toeplitz(row) if !a.dense => write_rows(
                    out,
                    &["gap".into(), "covariance".into()],
                    row.values
                        .iter()
                        .enumerate()
                        .map(|(g, v)| vec![g as f64, *v]),
                )?,
                other => {
                    let m = other.into_dense();
                    let header: Vec<String> = (0..m.dim).map(|j| format!("c{j}")).collect();
                    write_rows(out, &header, (0..m.dim).map(|i| m.row(i).to_vec()))?;
                }
            }
        }
        Command::Simulate(a) => {
            let (design, params) = load_inputs(&a.design, &a.params)?;
            if a.reps == 0 {
                return Err(invalid("reps must be at least 1"));
            }
            let rows = if a.paths {
                sample_temporal_u_path(&design, &params, a.seed, a.reps)?
            } else {
                let form = a
                    .form
                    .map(BoxForm::from)
                    .unwrap_or_else(|| default_form(&design));
                let cov = assemble_cov(&design, &params, &a.quad.spec()?, form, DEFAULT_SIZE_CAP)?;
                let factor = factorize(&cov.into_dense())?;
                if factor.jitter_used > 0.0 {
                    eprintln!(
                        "note: jitter {:e} added to the diagonal",
                        factor.jitter_used
                    );
                }
                sample(&factor, a.seed, a.reps)
            };
            let width = rows.first().map_or(0, Vec::len);
            let header: Vec<String> = (0..width).map(|j| format!("x{j}")).collect();
            write_rows(output(&a.out)?, &header, rows.into_iter())?;
        }
        Command::Estimate(a) => return estimate_cmd(a),
        Command::Clt(a) => experiment_cmd(&a, false)?,
        Command::Coverage(a) => experiment_cmd(&a, true)?,
        Command::Sweep(a) => {
            let cfg: SweepConfig = read_json(&a.config)?;
            let report = run_regime_sweep(&cfg)?;
            std::fs::create_dir_all(&a.out_dir)?;
            write_json(&report, &a.out_dir.join("sweep.json"))?;
            for p in &report.points {
                println!(
                    "alpha {} ({}) spatial-form mean {} temporal-form mean {} ratio error {:e}",
                    p.alpha,
                    p.regime,
                    p.spatial_form.empirical_mean,
                    p.temporal_form.empirical_mean,
                    p.ratio_relative_error
                );
            }
        }
        Command::Selftest(a) => {
            let report = run_selftest(a.seed)?;
            if let Some(path) = &a.out {
                write_json(&report, path)?;
            }
            if a.json {
                print_json(&report)?;
            } else {
                for c in &report.checks {
                    println!(
                        "{} {} (error {:e}, tolerance {:e})",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.max_error,
                        c.tolerance
                    );
                }
            }
            return Ok(if report.passed { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn experiment_cmd(a: &ExperimentArgs, coverage: bool) -> Result<()> {
    let cfg: ExperimentConfig = read_json(&a.config)?;
    let report = if coverage {
        run_coverage_experiment(&cfg)?
    } else {
        run_clt_experiment(&cfg)?
    };
    write_report_files(&report, &a.out_dir)?;
    let s = &report.summary;
    println!(
        "{} mean {} (target {}, z {:.3}) variance {} (target {}) ks {:.4} coverage {}",
        s.kind.name(),
        s.empirical_mean,
        s.target_mean,
        s.z_score,
        s.empirical_variance,
        s.target_variance,
        s.ks_distance,
        report.coverage
    );
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(invalid(format!("row {}: {e}", i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(invalid("data file has no numeric rows"));
    }
    Ok(rows)
}

fn estimate_cmd(a: EstimateArgs) -> Result<i32> {
    let (design, params) = load_inputs(&a.design, &a.params)?;
    let rows = read_rows(&a.data)?;
    let kind = match a.kind {
        KindArg::Mle => return mle_cmd(&design, &params, &rows, a.json),
        KindArg::Sp => VariationKind::Sp,
        KindArg::Te => VariationKind::Te,
        KindArg::BoxSp => VariationKind::BoxSp,
        KindArg::BoxTe => VariationKind::BoxTe,
    };
    let constants = constants_table(params.profile(), &a.quad.spec()?, a.series_cap)?;
    let mut results = Vec::with_capacity(rows.len());
    for row in &rows {
        let inc = if a.raw {
            difference(row, &design)?
        } else {
            row.clone()
        };
        let v = variation(kind, &inc, &design, params.profile())?;
        let e = estimate(&v, &constants, &design, a.level)?;
        results.push(serde_json::json!({ "variation": v, "estimate": e }));
    }
    if a.json {
        print_json(&results)?;
    } else {
        let mut out = std::io::stdout().lock();
        writeln!(out, "row,rescaled,estimate,lower,upper")?;
        for (i, r) in results.iter().enumerate() {
            let e = &r["estimate"];
            writeln!(
                out,
                "{i},{},{},{},{}",
                fmt_f64(r["variation"]["rescaled"].as_f64().unwrap_or(f64::NAN)),
                fmt_f64(e["estimate"].as_f64().unwrap_or(f64::NAN)),
                fmt_f64(e["lower"].as_f64().unwrap_or(f64::NAN)),
                fmt_f64(e["upper"].as_f64().unwrap_or(f64::NAN))
            )?;
        }
    }
    Ok(0)
}

fn difference(row: &[f64], design: &SamplingDesign) -> Result<Vec<f64>> {
    match *design {
        SamplingDesign::Spacetime { n, m, .. } => {
            if row.len() != (n + 2) * (m + 2) {
                return Err(Error::ShapeMismatch {
                    expected: (n + 2) * (m + 2),
                    got: row.len(),
                });
            }
            let grid: Vec<Vec<f64>> = row.chunks(n + 2).map(<[f64]>::to_vec).collect();
            box_diff(&grid)
        }
        _ => second_diff(row),
    }
}

/// Rows hold `u(t_1..t_m)`, or the full path `u(t_0..t_{m+1})` whose first and last entries are dropped.
fn mle_cmd(
    design: &SamplingDesign,
    params: &ModelParams,
    rows: &[Vec<f64>],
    json: bool,
) -> Result<i32> {
    let SamplingDesign::Temporal { delta, m } = *design else {
        return Err(invalid("mle needs a temporal design"));
    };
    if !params.profile().is_white_noise() {
        return Err(invalid("mle is available for beta = d = 1 only"));
    }
    let solver = MleSolver::new(m)?;
    let mut results = Vec::with_capacity(rows.len());
    for row in rows {
        let u = if row.len() == m + 2 {
            &row[1..=m]
        } else {
            &row[..]
        };
        results.push(solver.estimate(u, delta)?);
    }
    if json {
        print_json(&results)?;
    } else {
        println!("row,estimate,q_direct,q_weighted,boundary_term");
        for (i, r) in results.iter().enumerate() {
            println!(
                "{i},{},{},{},{}",
                fmt_f64(r.estimate),
                fmt_f64(r.q_direct),
                fmt_f64(r.q_weighted),
                fmt_f64(r.boundary_term)
            );
        }
    }
    Ok(0)
}
