//! C ABI over capflow.
//!
//! Every fallible function returns a [`CapflowStatus`]; on failure the
//! message is kept per thread and read with [`capflow_last_error`].
//! Strings handed out by the library must be released with
//! [`capflow_string_free`], runs with [`capflow_run_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use capflow::cli::RunConfig;
use capflow::flow::{run, FlowTrace};
use capflow::mobius::{ball_to_halfspace, conformal_factor, halfspace_to_ball, CapRadius};
use capflow::quermass::cap_quermass;
use capflow::symfunc::{CurvatureSpec, KappaVector};
use capflow::verify::{reports_json, run_suite, Suite, Verdict, VerifyConfig};
use capflow::CapflowError;

/// Result codes. The first four match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapflowStatus {
    Ok = 0,
    /// A verification check did not pass.
    CheckFailed = 1,
    Numerical = 2,
    /// Invalid configuration or argument outside its domain.
    Config = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    /// Output buffer too small.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// A finished flow run.
pub struct CapflowRun {
    trace: FlowTrace,
    seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: CapflowStatus, msg: impl Into<String>) -> CapflowStatus {
    set_error(msg);
    status
}

fn from_error(e: &CapflowError) -> CapflowStatus {
    let status = match capflow::cli::exit_code(e) {
        capflow::cli::EXIT_NUMERICAL => CapflowStatus::Numerical,
        _ => CapflowStatus::Config,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> CapflowStatus) -> CapflowStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(CapflowStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, CapflowStatus> {
    if p.is_null() {
        return Err(fail(CapflowStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CapflowStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> CapflowStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            CapflowStatus::Ok
        }
        Err(_) => fail(CapflowStatus::Internal, "output contains a NUL byte"),
    }
}

unsafe fn write_slice(out: *mut f64, len: usize, values: &[f64]) -> CapflowStatus {
    if out.is_null() {
        return fail(CapflowStatus::NullPointer, "null output buffer");
    }
    if len < values.len() {
        return fail(
            CapflowStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    CapflowStatus::Ok
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn capflow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn capflow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn capflow_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a flow described by a JSON config (the format read by
/// `capflow flow --config`). A run that stops on a numerical failure is
/// still returned, together with `Numerical`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_flow(config_json: *const c_char, out: *mut *mut CapflowRun) -> CapflowStatus {
    guard(|| {
        if out.is_null() {
            return fail(CapflowStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let text = match read_str(config_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg: RunConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(CapflowStatus::Config, format!("config: {e}")),
        };
        let result = cfg
            .flow
            .validate()
            .and_then(|_| cfg.initial.build(cfg.flow.grid, cfg.seed))
            .and_then(|g| run(&cfg.flow, g));
        match result {
            Ok(trace) => {
                let status = if trace.stop.is_failure() {
                    fail(
                        CapflowStatus::Numerical,
                        trace.failure.clone().unwrap_or_else(|| format!("{:?}", trace.stop)),
                    )
                } else {
                    CapflowStatus::Ok
                };
                *out = Box::into_raw(Box::new(CapflowRun { trace, seed: cfg.seed }));
                status
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `run` must come from [`capflow_run_flow`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_free(run: *mut CapflowRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of trace rows, 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_row_count(run: *const CapflowRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.rows.len())
}

/// Hypersurface dimension n; a row of quermassintegrals has n + 2 entries.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_dimension(run: *const CapflowRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.n())
}

/// Copies t and W_0..W_{n+1} of row `row` into `t` and `w` (length `len`).
///
/// # Safety
/// `run` must be a live handle, `t` writable, `w` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_row(
    run: *const CapflowRun,
    row: usize,
    t: *mut f64,
    w: *mut f64,
    len: usize,
) -> CapflowStatus {
    guard(|| {
        let Some(r) = run.as_ref() else {
            return fail(CapflowStatus::NullPointer, "null run handle");
        };
        let Some(data) = r.trace.rows.get(row) else {
            return fail(
                CapflowStatus::Config,
                format!("row {row} out of range ({} rows)", r.trace.rows.len()),
            );
        };
        if t.is_null() {
            return fail(CapflowStatus::NullPointer, "null t");
        }
        *t = data.t;
        write_slice(w, len, &data.w)
    })
}

/// Trace as CSV; free with [`capflow_string_free`].
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_trace_csv(run: *const CapflowRun, out: *mut *mut c_char) -> CapflowStatus {
    guard(|| match (run.as_ref(), out.is_null()) {
        (Some(r), false) => write_string(out, r.trace.to_csv()),
        _ => fail(CapflowStatus::NullPointer, "null argument"),
    })
}

/// Run summary as JSON; free with [`capflow_string_free`].
///
/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capflow_run_summary_json(run: *const CapflowRun, out: *mut *mut c_char) -> CapflowStatus {
    guard(|| match (run.as_ref(), out.is_null()) {
        (Some(r), false) => write_string(out, r.trace.summary_json(r.seed).to_string()),
        _ => fail(CapflowStatus::NullPointer, "null argument"),
    })
}

/// W_{0,θ}..W_{n+1,θ} of the cap C_{θ,r} (r = INFINITY for the flat ball)
/// into `out`, which must hold n + 2 values.
///
/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn capflow_cap_quermass(
    n: usize,
    theta: f64,
    r: f64,
    n_beta: usize,
    out: *mut f64,
    len: usize,
) -> CapflowStatus {
    guard(|| match cap_quermass(n, theta, CapRadius::from_f64(r), n_beta) {
        Ok(q) => write_slice(out, len, &q.w_theta),
        Err(e) => from_error(&e),
    })
}

/// Runs a verification suite. `config_json` may be NULL for defaults.
/// Writes the JSON report to `out` and returns `CheckFailed` if any check
/// did not pass.
///
/// # Safety
/// `suite` must be a NUL-terminated string, `config_json` NULL or one, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capflow_verify(
    suite: *const c_char,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> CapflowStatus {
    guard(|| {
        if out.is_null() {
            return fail(CapflowStatus::NullPointer, "null output");
        }
        *out = ptr::null_mut();
        let name = match read_str(suite) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let cfg: VerifyConfig = if config_json.is_null() {
            VerifyConfig::default()
        } else {
            match read_str(config_json).map(serde_json::from_str) {
                Ok(Ok(c)) => c,
                Ok(Err(e)) => return fail(CapflowStatus::Config, format!("config: {e}")),
                Err(s) => return s,
            }
        };
        let reports = match Suite::parse(name).and_then(|s| run_suite(s, &cfg)) {
            Ok(r) => r,
            Err(e) => return from_error(&e),
        };
        let status = write_string(out, reports_json(&reports).to_string());
        if status != CapflowStatus::Ok {
            return status;
        }
        match reports.iter().find(|r| r.verdict != Verdict::Pass) {
            Some(r) => fail(CapflowStatus::CheckFailed, format!("check {} did not pass", r.id)),
            None => CapflowStatus::Ok,
        }
    })
}

/// F = (E_k / E_l)^{1/(k-l)} at `kappa` (length n, all positive).
///
/// # Safety
/// `kappa` must be valid for `n` doubles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capflow_curvature_function(
    kappa: *const f64,
    n: usize,
    k: usize,
    l: usize,
    out: *mut f64,
) -> CapflowStatus {
    guard(|| {
        if kappa.is_null() || out.is_null() {
            return fail(CapflowStatus::NullPointer, "null argument");
        }
        let spec = CurvatureSpec { k, l };
        let res = KappaVector::new(std::slice::from_raw_parts(kappa, n))
            .and_then(|kv| spec.validate(n).and_then(|_| spec.eval(&kv)));
        match res {
            Ok(v) => {
                *out = v;
                CapflowStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

unsafe fn map_point(
    x: *const f64,
    dim: usize,
    out: *mut f64,
    f: fn(&[f64]) -> capflow::Result<Vec<f64>>,
) -> CapflowStatus {
    guard(|| {
        if x.is_null() {
            return fail(CapflowStatus::NullPointer, "null point");
        }
        match f(std::slice::from_raw_parts(x, dim)) {
            Ok(y) => write_slice(out, dim, &y),
            Err(e) => from_error(&e),
        }
    })
}

/// Möbius map from the unit ball to the upper half-space; points have `dim`
/// coordinates, the last one along the pole e.
///
/// # Safety
/// `x` and `out` must be valid for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn capflow_ball_to_halfspace(x: *const f64, dim: usize, out: *mut f64) -> CapflowStatus {
    map_point(x, dim, out, ball_to_halfspace)
}

/// Inverse of [`capflow_ball_to_halfspace`].
///
/// # Safety
/// `y` and `out` must be valid for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn capflow_halfspace_to_ball(y: *const f64, dim: usize, out: *mut f64) -> CapflowStatus {
    map_point(y, dim, out, halfspace_to_ball)
}

/// Pointwise stretch of the inverse map at a half-space point.
///
/// # Safety
/// `y` must be valid for `dim` doubles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn capflow_conformal_factor(y: *const f64, dim: usize, out: *mut f64) -> CapflowStatus {
    guard(|| {
        if y.is_null() || out.is_null() {
            return fail(CapflowStatus::NullPointer, "null argument");
        }
        match conformal_factor(std::slice::from_raw_parts(y, dim)) {
            Ok(v) => {
                *out = v;
                CapflowStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}
