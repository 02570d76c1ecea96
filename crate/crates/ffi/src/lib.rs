//! C ABI over the `rdi` library.
//!
//! Every function returns an [`RdiStatus`]; on failure the message is kept in
//! a thread-local slot readable through [`rdi_last_error_message`]. Panics are
//! caught at the boundary and reported as [`RdiStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use rdi::prob::{self, JointPmf};
use rdi::rd::{self, DistortionSpec, RdSolverConfig, RdSource};
use rdi::regions::{self, CorollaryCase, CorollaryParams, GaussianChainParams};
use rdi::sim::{self, PadIndex};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Usage = 3,
    InvalidPmf = 4,
    Capacity = 5,
    Infeasible = 6,
    Precondition = 7,
    Io = 8,
    Json = 9,
    Panic = 10,
}

/// Opaque joint distribution handle.
pub struct RdiJointPmf(JointPmf);

/// One point of a region. `r_h` is NaN when the setting has no helper.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdiPoint {
    pub r_h: f64,
    pub r: f64,
    pub d: f64,
    pub delta: f64,
}

impl From<regions::RdiPoint> for RdiPoint {
    fn from(p: regions::RdiPoint) -> Self {
        Self { r_h: p.r_h.unwrap_or(f64::NAN), r: p.r, d: p.d, delta: p.delta }
    }
}

#[derive(Debug, thiserror::Error)]
enum FfiError {
    #[error("null pointer passed as `{0}`")]
    Null(&'static str),
    #[error("argument `{0}` is not valid UTF-8")]
    Utf8(&'static str),
    #[error(transparent)]
    Core(#[from] rdi::Error),
}

impl FfiError {
    fn status(&self) -> RdiStatus {
        use rdi::Error as E;
        match self {
            FfiError::Null(_) => RdiStatus::NullPointer,
            FfiError::Utf8(_) => RdiStatus::InvalidUtf8,
            FfiError::Core(e) => match e {
                E::Usage(_) => RdiStatus::Usage,
                E::InvalidPmf(_) => RdiStatus::InvalidPmf,
                E::Capacity { .. } => RdiStatus::Capacity,
                E::Infeasible { .. } => RdiStatus::Infeasible,
                E::Precondition(_) => RdiStatus::Precondition,
                E::Io(_) => RdiStatus::Io,
                E::Json(_) => RdiStatus::Json,
            },
        }
    }
}

impl From<serde_json::Error> for FfiError {
    fn from(e: serde_json::Error) -> Self {
        FfiError::Core(rdi::Error::Json(e))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), FfiError> + UnwindSafe) -> RdiStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => RdiStatus::Ok,
        Ok(Err(e)) => {
            let status = e.status();
            set_error(e.to_string());
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RdiStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, FfiError> {
    if p.is_null() {
        return Err(FfiError::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| FfiError::Utf8(what))
}

/// Comma-separated variable names; NULL or "" is the empty list.
unsafe fn names<'a>(p: *const c_char, what: &'static str) -> Result<Vec<&'a str>, FfiError> {
    if p.is_null() {
        return Ok(Vec::new());
    }
    Ok(text(p, what)?.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
}

unsafe fn pmf<'a>(p: *const RdiJointPmf) -> Result<&'a JointPmf, FfiError> {
    p.as_ref().map(|h| &h.0).ok_or(FfiError::Null("pmf"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), FfiError> {
    if out.is_null() {
        return Err(FfiError::Null(what));
    }
    out.write(value);
    Ok(())
}

fn parse_case(name: &str) -> Result<CorollaryCase, FfiError> {
    Ok(serde_json::from_value(serde_json::Value::String(name.into()))?)
}

/// Parses a joint pmf from its JSON form and stores a new handle in `*out`.
/// Malformed JSON yields `Json`; a table that breaks the pmf invariants
/// yields `InvalidPmf`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer. The
/// handle must be released with [`rdi_pmf_free`].
#[no_mangle]
pub unsafe extern "C" fn rdi_pmf_from_json(json: *const c_char, out: *mut *mut RdiJointPmf) -> RdiStatus {
    guard(|| {
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        let parsed: JointPmf = serde_json::from_str(text(json, "json")?).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => FfiError::Core(rdi::Error::InvalidPmf(e.to_string())),
            _ => e.into(),
        })?;
        out.write(Box::into_raw(Box::new(RdiJointPmf(parsed))));
        Ok(())
    })
}

/// Releases a handle from [`rdi_pmf_from_json`]. NULL is ignored.
///
/// # Safety
/// `pmf` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdi_pmf_free(pmf: *mut RdiJointPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// `H(over | given)` in bits. Names are comma-separated; `given` may be NULL.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rdi_entropy(
    pmf_handle: *const RdiJointPmf,
    over: *const c_char,
    given: *const c_char,
    out: *mut f64,
) -> RdiStatus {
    guard(|| {
        let p = pmf(pmf_handle)?;
        let over = names(over, "over")?;
        let given = names(given, "given")?;
        write(out, prob::entropy(p, &over, &given)?, "out")
    })
}

/// `I(a; b | given)` in bits. Names are comma-separated; `given` may be NULL.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rdi_mutual_information(
    pmf_handle: *const RdiJointPmf,
    a: *const c_char,
    b: *const c_char,
    given: *const c_char,
    out: *mut f64,
) -> RdiStatus {
    guard(|| {
        let p = pmf(pmf_handle)?;
        let (a, b, given) = (names(a, "a")?, names(b, "b")?, names(given, "given")?);
        write(out, prob::mutual_information(p, &a, &b, &given)?, "out")
    })
}

/// Binary entropy of `p` in bits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdi_binary_entropy(p: f64, out: *mut f64) -> RdiStatus {
    guard(|| write(out, prob::binary_entropy(p)?, "out"))
}

/// Rate-distortion function of `x` with side information `si` at both ends.
/// `distortion_json` is e.g. `{"kind":"hamming"}`; `solver_json` may be NULL
/// for the default solver settings.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rdi_rd_si_enc(
    pmf_handle: *const RdiJointPmf,
    x: *const c_char,
    si: *const c_char,
    distortion_json: *const c_char,
    solver_json: *const c_char,
    d: f64,
    out: *mut f64,
) -> RdiStatus {
    guard(|| {
        let p = pmf(pmf_handle)?;
        let source = RdSource::new(p, text(x, "x")?, &names(si, "si")?)?;
        let dist: DistortionSpec = serde_json::from_str(text(distortion_json, "distortion_json")?)?;
        let cfg: RdSolverConfig =
            if solver_json.is_null() { RdSolverConfig::default() } else { serde_json::from_str(text(solver_json, "solver_json")?)? };
        write(out, rd::rd_si_enc(&source, &dist, d, &cfg)?, "out")
    })
}

/// Closed-form region point for a binary erasure case such as
/// `"erased-y-hamming"`. `params_json` holds the case parameters; pass NaN
/// as `r_h` for cases without a helper.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rdi_corollary_region(
    case_name: *const c_char,
    params_json: *const c_char,
    d: f64,
    r_h: f64,
    out: *mut RdiPoint,
) -> RdiStatus {
    guard(|| {
        let case = parse_case(text(case_name, "case_name")?)?;
        let params: CorollaryParams = serde_json::from_str(text(params_json, "params_json")?)?;
        let rh = (!r_h.is_nan()).then_some(r_h);
        write(out, regions::corollary_region(case, &params, d, rh)?.into(), "out")
    })
}

/// Gaussian chain region point. `r_h` may be infinite. `saturated` may be NULL.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rdi_gaussian_region(
    params_json: *const c_char,
    r_h: f64,
    d: f64,
    out: *mut RdiPoint,
    saturated: *mut bool,
) -> RdiStatus {
    guard(|| {
        let params: GaussianChainParams = serde_json::from_str(text(params_json, "params_json")?)?;
        let g = regions::gaussian_region(&params, r_h, d)?;
        write(out, g.point.into(), "out")?;
        if !saturated.is_null() {
            saturated.write(g.saturated);
        }
        Ok(())
    })
}

/// Modular one-time pad on `[1 : modulus]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdi_one_time_pad(message: u64, key: u64, modulus: u64, out: *mut u64) -> RdiStatus {
    guard(|| {
        let c = sim::one_time_pad(PadIndex::new(message, modulus)?, PadIndex::new(key, modulus)?)?;
        write(out, c.value(), "out")
    })
}

/// Copy of the last error message on this thread, or NULL if the last call
/// succeeded. Free with [`rdi_string_free`].
#[no_mangle]
pub extern "C" fn rdi_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_deref() {
        Some(msg) => CString::new(msg.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from [`rdi_last_error_message`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
