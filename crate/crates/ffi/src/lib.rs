//! C ABI over `wavespeed`. Every fallible function returns a [`WsStatus`];
//! on failure the message is available from [`ws_last_error_message`] on the
//! same thread. Handles are opaque and released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use wavespeed::covariance::{assemble_cov, BoxForm, CovMatrix, DEFAULT_SIZE_CAP};
use wavespeed::inference::{estimate, hellinger_sq, mle_whitenoise, variation, VariationKind};
use wavespeed::sampler::{draw, factorize, CholFactor};
use wavespeed::specfun::{constants_table, QuadratureSpec};
use wavespeed::{Error, ModelParams, NoiseProfile, SamplingDesign};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    InvalidArgument = 1,
    Numerical = 2,
    SizeCap = 3,
    NotPsd = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsDesignKind {
    Spatial = 0,
    Temporal = 1,
    Spacetime = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsBoxForm {
    /// Chosen from alpha: spatial when alpha >= 1.
    Auto = 0,
    Spatial = 1,
    Temporal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsKind {
    Sp = 0,
    Te = 1,
    BoxSp = 2,
    BoxTe = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsParams {
    pub vartheta: f64,
    pub beta: f64,
    pub d: u32,
}

/// Fields not used by `kind` are ignored.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsDesign {
    pub kind: WsDesignKind,
    pub t: f64,
    pub lambda: f64,
    pub delta: f64,
    pub n: usize,
    pub m: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WsConstants {
    pub c_sp_e: f64,
    pub c_sp_v: f64,
    pub c_te_e: f64,
    pub c_te_v: f64,
    pub c_box_sp_e: f64,
    pub c_box_sp_v: f64,
    pub c_box_te_e: f64,
    pub c_box_te_v: f64,
    pub error_estimate: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WsEstimate {
    pub raw: f64,
    pub rescaled: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub std_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WsMle {
    pub estimate: f64,
    pub q_direct: f64,
    pub q_weighted: f64,
    pub boundary_term: f64,
}

/// Assembled dense covariance of an increment vector.
pub struct WsCovariance {
    matrix: CovMatrix,
}

/// Cholesky factor ready for sampling.
pub struct WsSampler {
    factor: CholFactor,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> WsStatus {
    match err {
        Error::SizeCapExceeded { .. } => WsStatus::SizeCap,
        Error::NotPsd { .. } => WsStatus::NotPsd,
        e if e.is_numerical() => WsStatus::Numerical,
        _ => WsStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), WsStatusError>>(f: F) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(WsStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WsStatus::Panic
        }
    }
}

struct WsStatusError(WsStatus, String);

impl From<Error> for WsStatusError {
    fn from(e: Error) -> Self {
        WsStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> WsStatusError {
    WsStatusError(WsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, WsStatusError> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, WsStatusError> {
    p.as_mut().ok_or_else(|| null(what))
}

fn to_params(p: &WsParams) -> Result<ModelParams, WsStatusError> {
    Ok(ModelParams::new(p.vartheta, p.beta, p.d)?)
}

fn to_design(d: &WsDesign) -> Result<SamplingDesign, WsStatusError> {
    let design = match d.kind {
        WsDesignKind::Spatial => SamplingDesign::Spatial {
            t: d.t,
            lambda: d.lambda,
            n: d.n,
        },
        WsDesignKind::Temporal => SamplingDesign::Temporal {
            delta: d.delta,
            m: d.m,
        },
        WsDesignKind::Spacetime => SamplingDesign::Spacetime {
            lambda: d.lambda,
            delta: d.delta,
            n: d.n,
            m: d.m,
        },
    };
    design.validate()?;
    Ok(design)
}

/// Copies the last error message of this thread, NUL-terminated, into `buf`
/// (truncating to `len - 1` bytes). Returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn ws_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Asymptotic constants for noise exponent `beta` in dimension `d`.
#[no_mangle]
pub unsafe extern "C" fn ws_constants(
    beta: f64,
    d: u32,
    series_cap: usize,
    out: *mut WsConstants,
) -> WsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let c = constants_table(
            NoiseProfile::new(beta, d)?,
            &QuadratureSpec::default(),
            series_cap,
        )?;
        *out = WsConstants {
            c_sp_e: c.c_sp_e,
            c_sp_v: c.c_sp_v,
            c_te_e: c.c_te_e,
            c_te_v: c.c_te_v,
            c_box_sp_e: c.c_box_sp_e,
            c_box_sp_v: c.c_box_sp_v,
            c_box_te_e: c.c_box_te_e,
            c_box_te_v: c.c_box_te_v,
            error_estimate: c.error_estimate,
        };
        Ok(())
    })
}

/// Assembles the covariance of the increment vector of `design`.
#[no_mangle]
pub unsafe extern "C" fn ws_cov_new(
    params: *const WsParams,
    design: *const WsDesign,
    form: WsBoxForm,
    out: *mut *mut WsCovariance,
) -> WsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let params = to_params(deref(params, "params")?)?;
        let design = to_design(deref(design, "design")?)?;
        let form = match form {
            WsBoxForm::Spatial => BoxForm::SpatialForm,
            WsBoxForm::Temporal => BoxForm::TemporalForm,
            WsBoxForm::Auto => match design.alpha() {
                Some(a) if a < 1.0 => BoxForm::TemporalForm,
                _ => BoxForm::SpatialForm,
            },
        };
        let matrix = assemble_cov(
            &design,
            &params,
            &QuadratureSpec::default(),
            form,
            DEFAULT_SIZE_CAP,
        )?
        .into_dense();
        *out = Box::into_raw(Box::new(WsCovariance { matrix }));
        Ok(())
    })
}

/// Dimension of the covariance, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ws_cov_dim(cov: *const WsCovariance) -> usize {
    cov.as_ref().map_or(0, |c| c.matrix.dim)
}

/// Copies the row-major matrix into `buf`, which must hold `dim * dim` values.
#[no_mangle]
pub unsafe extern "C" fn ws_cov_copy(
    cov: *const WsCovariance,
    buf: *mut f64,
    len: usize,
) -> WsStatus {
    guard(|| {
        let cov = deref(cov, "cov")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = cov.matrix.data.len();
        if len < need {
            return Err(WsStatusError(
                WsStatus::BufferTooSmall,
                format!("buffer holds {len} values, need {need}"),
            ));
        }
        std::ptr::copy_nonoverlapping(cov.matrix.data.as_ptr(), buf, need);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ws_cov_free(cov: *mut WsCovariance) {
    if !cov.is_null() {
        drop(Box::from_raw(cov));
    }
}

/// Factorizes `cov` for sampling; `cov` may be freed afterwards.
#[no_mangle]
pub unsafe extern "C" fn ws_sampler_new(
    cov: *const WsCovariance,
    out: *mut *mut WsSampler,
) -> WsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        let cov = deref(cov, "cov")?;
        let factor = factorize(&cov.matrix)?;
        *out = Box::into_raw(Box::new(WsSampler { factor }));
        Ok(())
    })
}

/// Diagonal jitter that was needed to factorize, or NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ws_sampler_jitter(sampler: *const WsSampler) -> f64 {
    sampler.as_ref().map_or(f64::NAN, |s| s.factor.jitter_used)
}

/// Writes replicate `replicate` of `seed` (length `dim`) into `buf`.
#[no_mangle]
pub unsafe extern "C" fn ws_sampler_draw(
    sampler: *const WsSampler,
    seed: u64,
    replicate: u64,
    buf: *mut f64,
    len: usize,
) -> WsStatus {
    guard(|| {
        let s = deref(sampler, "sampler")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < s.factor.dim {
            return Err(WsStatusError(
                WsStatus::BufferTooSmall,
                format!("buffer holds {len} values, need {}", s.factor.dim),
            ));
        }
        let x = draw(&s.factor, seed, replicate);
        std::ptr::copy_nonoverlapping(x.as_ptr(), buf, x.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ws_sampler_free(sampler: *mut WsSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Moment estimator of the wave speed with its `level` confidence interval.
#[no_mangle]
pub unsafe extern "C" fn ws_estimate(
    kind: WsKind,
    increments: *const f64,
    len: usize,
    params: *const WsParams,
    design: *const WsDesign,
    level: f64,
    out: *mut WsEstimate,
) -> WsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if increments.is_null() {
            return Err(null("increments"));
        }
        let data = std::slice::from_raw_parts(increments, len);
        let params = to_params(deref(params, "params")?)?;
        let design = to_design(deref(design, "design")?)?;
        let kind = match kind {
            WsKind::Sp => VariationKind::Sp,
            WsKind::Te => VariationKind::Te,
            WsKind::BoxSp => VariationKind::BoxSp,
            WsKind::BoxTe => VariationKind::BoxTe,
        };
        let constants = constants_table(params.profile(), &QuadratureSpec::default(), 256)?;
        let v = variation(kind, data, &design, params.profile())?;
        let e = estimate(&v, &constants, &design, level)?;
        *out = WsEstimate {
            raw: v.raw,
            rescaled: v.rescaled,
            estimate: e.estimate,
            lower: e.lower,
            upper: e.upper,
            std_error: e.std_error,
        };
        Ok(())
    })
}

/// White-noise maximum likelihood estimator from `u(t_1), ..., u(t_len)`.
#[no_mangle]
pub unsafe extern "C" fn ws_mle_whitenoise(
    path: *const f64,
    len: usize,
    delta: f64,
    out: *mut WsMle,
) -> WsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let r = mle_whitenoise(std::slice::from_raw_parts(path, len), delta)?;
        *out = WsMle {
            estimate: r.estimate,
            q_direct: r.q_direct,
            q_weighted: r.q_weighted,
            boundary_term: r.boundary_term,
        };
        Ok(())
    })
}

/// Squared Hellinger distance between the temporal observation laws under two wave speeds.
#[no_mangle]
pub unsafe extern "C" fn ws_hellinger_sq(
    theta0: f64,
    theta1: f64,
    beta: f64,
    m: u64,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = hellinger_sq(theta0, theta1, beta, m)?;
        Ok(())
    })
}
