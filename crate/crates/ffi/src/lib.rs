//! C ABI over `hardy_forge`.
//!
//! Every fallible call returns an [`HfStatus`]; on failure the message is kept
//! per thread and can be fetched with [`hf_last_error`]. Strings handed out by
//! this library are freed with [`hf_string_free`], handles with their own
//! `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use hardy_forge::cli::{self, RunOptions};
use hardy_forge::numgrid::LogGrid;
use hardy_forge::radial::{self, RadialOperator, WeightProfile};
use hardy_forge::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OutsideGrid = 3,
    NotNonnegative = 4,
    Singular = 5,
    NoConvergence = 6,
    InsufficientDecay = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for HfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::NonPositive { .. } => HfStatus::InvalidInput,
            Error::OutsideGrid(..) => HfStatus::OutsideGrid,
            Error::NotNonnegative(_) => HfStatus::NotNonnegative,
            Error::Singular(_) => HfStatus::Singular,
            Error::NoConvergence { .. } => HfStatus::NoConvergence,
            Error::InsufficientDecay(_) => HfStatus::InsufficientDecay,
            Error::Config(_) => HfStatus::Config,
            Error::Io(_) => HfStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (HfStatus, String)>) -> HfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HfStatus::Panic
        }
    }
}

fn lift(e: Error) -> (HfStatus, String) {
    (HfStatus::from(&e), e.to_string())
}

fn null() -> (HfStatus, String) {
    (HfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (HfStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| (HfStatus::InvalidInput, "string is not valid UTF-8".into()))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn hf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Free with `hf_string_free`.
#[no_mangle]
pub extern "C" fn hf_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map(|c| c.clone().into_raw()).unwrap_or(ptr::null_mut()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn hf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `((n-2)/2)^2`.
#[no_mangle]
pub extern "C" fn hf_hardy_constant(n: usize) -> f64 {
    hardy_forge::catalog::hardy_constant(n)
}

/// Optimal radial weight of `-Δ + V` computed on a log grid.
pub struct HfRadialWeight {
    weight: WeightProfile,
}

/// Builds the optimal radial weight for potential `spec` (`zero`, `constant:c`,
/// `power:c,b` or `csv:path`) on `points` log-spaced nodes in `[r_min, r_max]`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_radial_weight_new(
    n: usize,
    spec: *const c_char,
    r_min: f64,
    r_max: f64,
    points: usize,
    out: *mut *mut HfRadialWeight,
) -> HfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let spec = read_str(spec)?;
        let potential = cli::parse_potential(spec).map_err(lift)?;
        let grid = Arc::new(LogGrid::new(r_min, r_max, points).map_err(lift)?);
        let op = RadialOperator::new(n, potential, grid).map_err(lift)?;
        let psi = radial::solve_radial_solution(&op).map_err(lift)?;
        let green = radial::green_from_psi(&op, &psi).and_then(|g| g.subcritical()).map_err(lift)?;
        let weight = radial::optimal_weight_radial(&psi, &green).map_err(lift)?;
        *out = Box::into_raw(Box::new(HfRadialWeight { weight }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from `hf_radial_weight_new` and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hf_radial_weight_free(h: *mut HfRadialWeight) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of grid nodes, 0 for NULL.
///
/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn hf_radial_weight_len(h: *const HfRadialWeight) -> usize {
    h.as_ref().map_or(0, |h| h.weight.values.len())
}

/// `W(r)` by interpolation.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hf_radial_weight_eval(h: *const HfRadialWeight, r: f64, out: *mut f64) -> HfStatus {
    guard(|| {
        let (h, out) = (h.as_ref().ok_or_else(null)?, out.as_mut().ok_or_else(null)?);
        *out = h.weight.at(r).map_err(lift)?;
        Ok(())
    })
}

/// Copies nodes and `W` values into caller buffers of length `len`, which must
/// equal `hf_radial_weight_len`.
///
/// # Safety
/// `r` and `w` must each point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hf_radial_weight_samples(
    h: *const HfRadialWeight,
    r: *mut f64,
    w: *mut f64,
    len: usize,
) -> HfStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(null)?;
        if r.is_null() || w.is_null() {
            return Err(null());
        }
        let m = h.weight.values.len();
        if len != m {
            return Err((HfStatus::InvalidInput, format!("buffer length {len} does not match grid length {m}")));
        }
        let (r, w) = (std::slice::from_raw_parts_mut(r, len), std::slice::from_raw_parts_mut(w, len));
        r.copy_from_slice(h.weight.grid().nodes());
        w.copy_from_slice(&h.weight.values);
        Ok(())
    })
}

/// Largest relative disagreement between the two weight formulas on the grid.
///
/// # Safety
/// `h` must be a live handle or NULL (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn hf_radial_weight_consistency(h: *const HfRadialWeight) -> f64 {
    h.as_ref().map_or(f64::NAN, |h| h.weight.consistency)
}

/// Runs a battery from a config document and returns the JSON report in `out_json`
/// (free with `hf_string_free`). `subcommand` may be NULL when the document names it.
/// `*out_pass` is set to 1 if every check passed, else 0.
///
/// # Safety
/// String arguments must be NUL-terminated; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hf_run_battery(
    config: *const c_char,
    subcommand: *const c_char,
    seed: i64,
    out_json: *mut *mut c_char,
    out_pass: *mut i32,
) -> HfStatus {
    guard(|| {
        if out_json.is_null() || out_pass.is_null() {
            return Err(null());
        }
        *out_json = ptr::null_mut();
        let text = read_str(config)?;
        let sub = if subcommand.is_null() { None } else { Some(read_str(subcommand)?.parse().map_err(lift)?) };
        let mut cfg = cli::parse_config_with(text, sub).map_err(lift)?;
        if seed >= 0 {
            cfg.set_seed(seed as u64);
        }
        let run = cli::run(&cfg, &RunOptions::default()).map_err(lift)?;
        *out_pass = i32::from(run.report.pass);
        *out_json = to_c_string(run.report.to_json());
        Ok(())
    })
}
