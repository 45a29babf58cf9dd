//! C ABI over `betakde`.
//!
//! Every function returns a [`BkdeStatus`] and writes results through out
//! pointers. On failure, `bkde_last_error_message` describes the most recent
//! error on the calling thread. Models are opaque and must be released with
//! `bkde_model_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use betakde::kernels::{DensityModel, Family, Sample};
use betakde::{select_bandwidth, BetaParams, Error, KurtosisMode, QuadratureRule};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BkdeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    DegenerateSample = 4,
    InsufficientData = 5,
    Numerical = 6,
    Divergence = 7,
    Optimization = 8,
    Panic = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BkdeFamily {
    /// Beta kernel with shapes (x/h + 1, (1 - x)/h + 1).
    BetaF1 = 0,
    /// Boundary-corrected beta kernel; requires h < 0.25.
    BetaF2 = 1,
    /// Gaussian kernel on the logit scale, data clipped to [1e-6, 1 - 1e-6].
    GaussLogit = 2,
    /// Gaussian kernel with reflection at both ends.
    GaussReflect = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BkdeKurtosisMode {
    Standard = 0,
    SumSquared = 1,
}

/// A selected bandwidth. Fields that do not apply are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BkdeSelection {
    pub h: f64,
    /// 1 when the moment fit was infeasible and the heuristic was used.
    pub used_fallback: i32,
    pub a_hat: f64,
    pub b_hat: f64,
    pub scaling_constant: f64,
}

/// Opaque fitted density.
pub struct BkdeModel {
    inner: DensityModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> BkdeStatus {
    match e {
        Error::Domain { .. } => BkdeStatus::Domain,
        Error::Config(_) => BkdeStatus::InvalidArgument,
        Error::DegenerateSample(_) => BkdeStatus::DegenerateSample,
        Error::InsufficientData(_) => BkdeStatus::InsufficientData,
        Error::Numerical(_) | Error::Integration { .. } => BkdeStatus::Numerical,
        Error::Divergence(_) => BkdeStatus::Divergence,
        Error::Optimization(_) => BkdeStatus::Optimization,
        _ => BkdeStatus::Internal,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), BkdeStatus>>(f: F) -> BkdeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BkdeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            BkdeStatus::Panic
        }
    }
}

fn lift<T>(r: betakde::Result<T>) -> Result<T, BkdeStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> BkdeStatus {
    set_error(format!("{what} is null"));
    BkdeStatus::NullPointer
}

unsafe fn sample_from(data: *const f64, n: usize) -> Result<Sample, BkdeStatus> {
    if data.is_null() {
        return Err(null("data"));
    }
    let values = std::slice::from_raw_parts(data, n).to_vec();
    lift(Sample::new(values))
}

unsafe fn model_ref<'a>(model: *const BkdeModel) -> Result<&'a BkdeModel, BkdeStatus> {
    model.as_ref().ok_or_else(|| null("model"))
}

impl From<BkdeFamily> for Family {
    fn from(f: BkdeFamily) -> Self {
        match f {
            BkdeFamily::BetaF1 => Family::BetaF1,
            BkdeFamily::BetaF2 => Family::BetaF2,
            BkdeFamily::GaussLogit => Family::gauss_logit(),
            BkdeFamily::GaussReflect => Family::GaussReflect,
        }
    }
}

impl From<BkdeKurtosisMode> for KurtosisMode {
    fn from(m: BkdeKurtosisMode) -> Self {
        match m {
            BkdeKurtosisMode::Standard => KurtosisMode::Standard,
            BkdeKurtosisMode::SumSquared => KurtosisMode::SumSquared,
        }
    }
}

/// Reference-rule bandwidth for `n` observations in [0, 1].
///
/// # Safety
/// `data` must point to `n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bkde_select_bandwidth(
    data: *const f64,
    n: usize,
    mode: BkdeKurtosisMode,
    out: *mut BkdeSelection,
) -> BkdeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = sample_from(data, n)?;
        let sel = lift(select_bandwidth(&s, mode.into()))?;
        *out = BkdeSelection {
            h: sel.h,
            used_fallback: sel.used_fallback as i32,
            a_hat: sel.params.map_or(f64::NAN, |p| p.a),
            b_hat: sel.params.map_or(f64::NAN, |p| p.b),
            scaling_constant: sel.scaling_constant.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Closed-form reference bandwidth for Beta(a, b); needs a, b > 1.5.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bkde_h_ref(a: f64, b: f64, n: usize, out: *mut f64) -> BkdeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lift(BetaParams::new(a, b))?;
        *out = lift(betakde::h_ref(p, n))?;
        Ok(())
    })
}

/// Fits a density with a fixed bandwidth.
///
/// # Safety
/// `data` must point to `n` readable doubles and `out` must be writable.
/// The model written to `*out` is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_new(
    family: BkdeFamily,
    data: *const f64,
    n: usize,
    h: f64,
    out: *mut *mut BkdeModel,
) -> BkdeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = sample_from(data, n)?;
        let inner = lift(DensityModel::fit(family.into(), s, h))?;
        *out = Box::into_raw(Box::new(BkdeModel { inner }));
        Ok(())
    })
}

/// Fits the boundary-corrected beta estimator at the reference-rule bandwidth.
/// `selection` may be null.
///
/// # Safety
/// As for `bkde_model_new`; `selection`, when not null, must be writable.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_new_reference(
    data: *const f64,
    n: usize,
    mode: BkdeKurtosisMode,
    out: *mut *mut BkdeModel,
    selection: *mut BkdeSelection,
) -> BkdeStatus {
    let mut sel = BkdeSelection {
        h: f64::NAN,
        used_fallback: 0,
        a_hat: f64::NAN,
        b_hat: f64::NAN,
        scaling_constant: f64::NAN,
    };
    let status = bkde_select_bandwidth(data, n, mode, &mut sel);
    if status != BkdeStatus::Ok {
        return status;
    }
    let h = sel.h.min(betakde::bandwidth::F2_BRACKET_HI);
    let status = bkde_model_new(BkdeFamily::BetaF2, data, n, h, out);
    if status == BkdeStatus::Ok && !selection.is_null() {
        *selection = sel;
    }
    status
}

/// # Safety
/// `model` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_evaluate(model: *const BkdeModel, x: f64, out: *mut f64) -> BkdeStatus {
    guard(|| {
        let m = model_ref(model)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = m.inner.evaluate(x);
        Ok(())
    })
}

/// # Safety
/// `xs` must hold `len` readable doubles and `out` `len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_evaluate_many(
    model: *const BkdeModel,
    xs: *const f64,
    len: usize,
    out: *mut f64,
) -> BkdeStatus {
    guard(|| {
        let m = model_ref(model)?;
        if xs.is_null() || out.is_null() {
            return Err(null("xs or out"));
        }
        let xs = std::slice::from_raw_parts(xs, len);
        let out = std::slice::from_raw_parts_mut(out, len);
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = m.inner.evaluate(x);
        }
        Ok(())
    })
}

/// Integral of the estimate over [0, 1].
///
/// # Safety
/// `model` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_total_mass(model: *const BkdeModel, out: *mut f64) -> BkdeStatus {
    guard(|| {
        let m = model_ref(model)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = lift(m.inner.total_mass(&QuadratureRule::default()))?;
        Ok(())
    })
}

/// Rescales the model in place so it integrates to one.
///
/// # Safety
/// `model` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_normalize(model: *mut BkdeModel) -> BkdeStatus {
    guard(|| {
        let m = model.as_mut().ok_or_else(|| null("model"))?;
        m.inner = lift(m.inner.normalize(&QuadratureRule::default()))?;
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_bandwidth(model: *const BkdeModel, out: *mut f64) -> BkdeStatus {
    guard(|| {
        let m = model_ref(model)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = m.inner.bandwidth();
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bkde_model_free(model: *mut BkdeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bkde_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bkde_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}
