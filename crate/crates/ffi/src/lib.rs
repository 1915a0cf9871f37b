//! C ABI for the rankone laboratory.
//!
//! Every fallible function returns a [`RankoneStatus`]. On failure the
//! message is kept per thread and read with [`rankone_last_error`].
//! Handles are opaque; each `*_new`/`*_run` has a matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use rankone::harness::{self, ExperimentConfig, MeasureSource, RunReport};
use rankone::perturbation::{clark_spectrum_circle, clark_spectrum_line};
use rankone::{cauchy, Error, Measure, Support};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankoneStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidParameter = 4,
    Numerical = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Support of a measure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankoneSupport {
    Line = 0,
    Circle = 1,
}

/// Finite measure on the line or the circle.
pub struct RankoneMeasure(Measure);

/// Report of one experiment run, with its JSON and optional CSV text.
pub struct RankoneReport {
    report: RunReport,
    json: CString,
    csv: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> RankoneStatus {
    match e {
        Error::Config { .. } | Error::Json(_) => RankoneStatus::Config,
        Error::Io(_) => RankoneStatus::Io,
        Error::InvalidParameter(_) | Error::DomainMismatch(_) | Error::BoundaryPoint(_) | Error::SupportCollision(_) => {
            RankoneStatus::InvalidParameter
        }
        _ => RankoneStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), RankoneStatus>) -> RankoneStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RankoneStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RankoneStatus::Panic
        }
    }
}

fn fail(e: Error) -> RankoneStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> RankoneStatus {
    set_error(format!("{what} is null"));
    RankoneStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RankoneStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        RankoneStatus::InvalidUtf8
    })
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], RankoneStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn measure_ref<'a>(m: *const RankoneMeasure) -> Result<&'a Measure, RankoneStatus> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("measure"))
}

fn support_of(s: RankoneSupport) -> Support {
    match s {
        RankoneSupport::Line => Support::Line,
        RankoneSupport::Circle => Support::Circle,
    }
}

/// Message of the last failure on this thread; empty when none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rankone_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Purely atomic measure from `n` positions (points on the line, angles on
/// the circle) and positive weights.
///
/// # Safety
/// `positions` and `weights` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rankone_measure_atomic(
    support: RankoneSupport,
    positions: *const f64,
    weights: *const f64,
    n: usize,
    out: *mut *mut RankoneMeasure,
) -> RankoneStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let pos = slice_arg(positions, n, "positions")?;
        let w = slice_arg(weights, n, "weights")?;
        let atoms: Vec<(f64, f64)> = pos.iter().copied().zip(w.iter().copied()).collect();
        let mu = Measure::atomic(support_of(support), &atoms).map_err(fail)?;
        *out = Box::into_raw(Box::new(RankoneMeasure(mu)));
        Ok(())
    })
}

/// Measure from the same text the command line accepts: `lebesgue_grid(N)`,
/// `atoms([[pos, weight], ...])`, `mixed`, `file:PATH` or an inline JSON
/// measure object.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rankone_measure_parse(
    text: *const c_char,
    support: RankoneSupport,
    out: *mut *mut RankoneMeasure,
) -> RankoneStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        let mu = MeasureSource::parse_cli(text, support_of(support)).and_then(|s| s.build()).map_err(fail)?;
        *out = Box::into_raw(Box::new(RankoneMeasure(mu)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from a constructor in this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rankone_measure_free(m: *mut RankoneMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of nodes (atoms plus density cells), the length of function arrays.
///
/// # Safety
/// `m` must be a live measure handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn rankone_measure_dim(m: *const RankoneMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Total mass; NaN for a null handle.
///
/// # Safety
/// `m` must be a live measure handle or null.
#[no_mangle]
pub unsafe extern "C" fn rankone_measure_mass(m: *const RankoneMeasure) -> f64 {
    m.as_ref().map_or(f64::NAN, |m| m.0.mass())
}

/// Cauchy transform of `f dμ` at `z`: `∫ f dμ(x)/(x − z)` on the line and
/// `∫ f dμ(ξ)/(1 − ξ̄z)` on the circle. `f` holds `dim` interleaved
/// (re, im) pairs, or is null for `f ≡ 1`. The value goes to `out[0..2]`.
///
/// # Safety
/// `f` must hold `2·dim` doubles when non-null; `out` must hold 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn rankone_cauchy_transform(
    m: *const RankoneMeasure,
    f: *const f64,
    z_re: f64,
    z_im: f64,
    out: *mut f64,
) -> RankoneStatus {
    guard(|| {
        let mu = measure_ref(m)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values: Vec<Complex64> = if f.is_null() {
            vec![Complex64::new(1.0, 0.0); mu.dim()]
        } else {
            slice_arg(f, 2 * mu.dim(), "f")?.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
        };
        let z = Complex64::new(z_re, z_im);
        let v = match mu.support {
            Support::Line => cauchy::cauchy_line(mu, &values, z),
            Support::Circle => cauchy::cauchy_circle_r(mu, &values, z),
        }
        .map_err(fail)?;
        *out = v.re;
        *out.add(1) = v.im;
        Ok(())
    })
}

/// Spectral measure of the rank-one perturbation with coupling `α` (real on
/// the line, unimodular on the circle) of an atomic measure. Writes up to
/// `capacity` positions and weights and the true count to `len`; returns
/// `BufferTooSmall` when `capacity < len`.
///
/// # Safety
/// `positions` and `weights` must hold `capacity` doubles; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rankone_clark_spectrum(
    m: *const RankoneMeasure,
    alpha_re: f64,
    alpha_im: f64,
    positions: *mut f64,
    weights: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> RankoneStatus {
    guard(|| {
        let mu = measure_ref(m)?;
        if len.is_null() {
            return Err(null("len"));
        }
        let spec = match mu.support {
            Support::Line => {
                if alpha_im != 0.0 {
                    return Err(fail(Error::invalid("coupling on the line must be real")));
                }
                clark_spectrum_line(mu, alpha_re)
            }
            Support::Circle => clark_spectrum_circle(mu, Complex64::new(alpha_re, alpha_im)),
        }
        .map_err(fail)?;
        *len = spec.len();
        if capacity < spec.len() {
            set_error(format!("need room for {} atoms", spec.len()));
            return Err(RankoneStatus::BufferTooSmall);
        }
        if spec.is_empty() {
            return Ok(());
        }
        if positions.is_null() || weights.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(spec.positions.as_ptr(), positions, spec.len());
        ptr::copy_nonoverlapping(spec.weights.as_ptr(), weights, spec.len());
        Ok(())
    })
}

/// Runs the experiment described by a JSON configuration, the same format
/// `rankone run` reads. Output paths in the configuration are honored.
/// Failed checks still return `Ok`; see [`rankone_report_passed`].
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rankone_run_config(config_json: *const c_char, out: *mut *mut RankoneReport) -> RankoneStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(config_json, "config_json")?;
        let cfg = ExperimentConfig::from_json(text).map_err(fail)?;
        let result = harness::run(&cfg).map_err(fail)?;
        let json = harness::write_artifacts(&cfg, &result).map_err(fail)?;
        let report = RankoneReport {
            json: CString::new(json).expect("reports contain no NUL"),
            csv: result.csv.map(|c| CString::new(c).expect("tables contain no NUL")),
            report: result.report,
        };
        *out = Box::into_raw(Box::new(report));
        Ok(())
    })
}

/// # Safety
/// `r` must come from [`rankone_run_config`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rankone_report_free(r: *mut RankoneReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// 1 when every check passed, 0 otherwise or for a null handle.
///
/// # Safety
/// `r` must be a live report handle or null.
#[no_mangle]
pub unsafe extern "C" fn rankone_report_passed(r: *const RankoneReport) -> i32 {
    r.as_ref().is_some_and(|r| r.report.passed) as i32
}

/// Number of checks in the report.
///
/// # Safety
/// `r` must be a live report handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn rankone_report_check_count(r: *const RankoneReport) -> usize {
    r.as_ref().map_or(0, |r| r.report.checks.len())
}

/// The JSON report, owned by the handle.
///
/// # Safety
/// `r` must be a live report handle or null (returns null).
#[no_mangle]
pub unsafe extern "C" fn rankone_report_json(r: *const RankoneReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// The CSV table, owned by the handle; null when the subcommand has none.
///
/// # Safety
/// `r` must be a live report handle or null (returns null).
#[no_mangle]
pub unsafe extern "C" fn rankone_report_csv(r: *const RankoneReport) -> *const c_char {
    r.as_ref().and_then(|r| r.csv.as_ref()).map_or(ptr::null(), |c| c.as_ptr())
}
