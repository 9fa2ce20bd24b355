//! C ABI for the formctl toolkit.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns a [`FormctlStatus`]; on failure a message is kept per thread
//! and can be read with [`formctl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use formctl::config::ScenarioConfig;
use formctl::dynamics::AgentState;
use formctl::gains::{gamma_lower_bound, has_real_root, recommended_schedule};
use formctl::geometry::signed_area;
use formctl::sim::{simulate, SimOptions, SimOutcome, Verdict};
use formctl::{build_lff, Error, FormationSpec, GainSchedule, Point, QuarticCoefficients};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormctlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    Parse = 4,
    Domain = 5,
    Integration = 6,
    Io = 7,
    /// The requested value does not exist (e.g. no convergence time).
    Unavailable = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormctlVerdict {
    ConvergedStrongCongruent = 0,
    ConvergedOther = 1,
    NotConverged = 2,
    Diverged = 3,
}

impl From<Verdict> for FormctlVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::ConvergedStrongCongruent => Self::ConvergedStrongCongruent,
            Verdict::ConvergedOther => Self::ConvergedOther,
            Verdict::NotConverged => Self::NotConverged,
            Verdict::Diverged => Self::Diverged,
        }
    }
}

/// Integrator settings for [`formctl_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FormctlSimOptions {
    pub h: f64,
    pub t_final: f64,
    pub eps: f64,
    pub sustain: usize,
    pub override_collocated: bool,
}

/// Desired formation handle.
pub struct FormctlSpec(FormationSpec);

/// Gain schedule handle.
pub struct FormctlGains(GainSchedule);

/// Finished simulation handle.
pub struct FormctlRun(SimOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> FormctlStatus {
    match e {
        Error::Validation(_) => FormctlStatus::InvalidArgument,
        Error::Spec(_) => FormctlStatus::InvalidSpec,
        Error::Domain(_) => FormctlStatus::Domain,
        Error::Integration(_) => FormctlStatus::Integration,
        Error::Parse(_) | Error::Config(_) => FormctlStatus::Parse,
        Error::Io(_) => FormctlStatus::Io,
    }
}

struct Fail(FormctlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FormctlStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FormctlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FormctlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FormctlStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn points(xy: &[f64]) -> Vec<Point> {
    xy.chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next formctl call on the same thread.
#[no_mangle]
pub extern "C" fn formctl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a formation from a scenario config JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_spec_from_json(json: *const c_char, out: *mut *mut FormctlSpec) -> FormctlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(FormctlStatus::Parse, format!("json is not UTF-8: {e}")))?;
        let spec = ScenarioConfig::from_json_str(text)?.build_spec()?;
        write_out(out, Box::into_raw(Box::new(FormctlSpec(spec))), "out")
    })
}

/// Builds a formation from desired coordinates. `attachments` holds
/// `2 * (n - 2)` 1-based labels `i, j` for agents 3..n; `xy` holds `2 * n`
/// coordinates.
///
/// # Safety
/// Pointers must reference arrays of the stated lengths; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_spec_from_coordinates(
    n: usize,
    attachments: *const usize,
    xy: *const f64,
    out: *mut *mut FormctlSpec,
) -> FormctlStatus {
    guard(|| {
        if n < 2 {
            return Err(Fail(FormctlStatus::InvalidArgument, format!("n = {n} is below 2")));
        }
        let att = slice(attachments, 2 * (n - 2), "attachments")?;
        let coords = slice(xy, 2 * n, "xy")?;
        let pairs: Vec<(usize, usize)> = att.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let graph = build_lff(n, &pairs)?;
        let spec = FormationSpec::from_coordinates(graph, points(coords))?;
        write_out(out, Box::into_raw(Box::new(FormctlSpec(spec))), "out")
    })
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `spec` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn formctl_spec_n(spec: *const FormctlSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.0.n())
}

/// Desired signed areas, one per triangle, copied into `out` (capacity
/// `len`, at least `n - 2`).
///
/// # Safety
/// `spec` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn formctl_spec_areas(spec: *const FormctlSpec, out: *mut f64, len: usize) -> FormctlStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        let areas = s.0.areas();
        if len < areas.len() {
            return Err(Fail(FormctlStatus::InvalidArgument, format!("need {} slots", areas.len())));
        }
        if !areas.is_empty() {
            if out.is_null() {
                return Err(null("out"));
            }
            ptr::copy_nonoverlapping(areas.as_ptr(), out, areas.len());
        }
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn formctl_spec_free(spec: *mut FormctlSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Gains clearing every triangle's bound by the relative `margin`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_gains_recommended(
    spec: *const FormctlSpec,
    alpha: f64,
    margin: f64,
    out: *mut *mut FormctlGains,
) -> FormctlStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        let g = recommended_schedule(&s.0, alpha, margin)?;
        write_out(out, Box::into_raw(Box::new(FormctlGains(g))), "out")
    })
}

/// The same `alpha` for every follower and `beta = ratio * alpha` for every
/// ordinary follower.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_gains_ratio(
    spec: *const FormctlSpec,
    alpha: f64,
    ratio: f64,
    out: *mut *mut FormctlGains,
) -> FormctlStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        let g = GainSchedule::uniform_ratio(s.0.n(), alpha, ratio)?;
        write_out(out, Box::into_raw(Box::new(FormctlGains(g))), "out")
    })
}

/// `beta / alpha` of the 1-based `agent` (3..n).
///
/// # Safety
/// `gains` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_gains_ratio_of(
    gains: *const FormctlGains,
    agent: usize,
    out: *mut f64,
) -> FormctlStatus {
    guard(|| {
        let g = deref(gains, "gains")?;
        let r = agent
            .checked_sub(1)
            .and_then(|k| g.0.ratio(k))
            .ok_or_else(|| Fail(FormctlStatus::InvalidArgument, format!("agent {agent} has no ratio")))?;
        write_out(out, r, "out")
    })
}

/// # Safety
/// `gains` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn formctl_gains_free(gains: *mut FormctlGains) {
    if !gains.is_null() {
        drop(Box::from_raw(gains));
    }
}

#[no_mangle]
pub extern "C" fn formctl_sim_options_default() -> FormctlSimOptions {
    let d = SimOptions::default();
    FormctlSimOptions {
        h: d.h,
        t_final: d.t_final,
        eps: d.eps,
        sustain: d.sustain,
        override_collocated: d.override_collocated,
    }
}

/// Simulates from `xy0` (`2 * n` coordinates). Only endpoints are kept.
///
/// # Safety
/// Handles must be live; `xy0` must hold `len` doubles; `opts` and `out`
/// must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn formctl_simulate(
    spec: *const FormctlSpec,
    gains: *const FormctlGains,
    xy0: *const f64,
    len: usize,
    opts: *const FormctlSimOptions,
    out: *mut *mut FormctlRun,
) -> FormctlStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        let g = deref(gains, "gains")?;
        let o = deref(opts, "opts")?;
        if len != 2 * s.0.n() {
            return Err(Fail(
                FormctlStatus::InvalidArgument,
                format!("xy0 has {len} values, expected {}", 2 * s.0.n()),
            ));
        }
        let init = AgentState::new(points(slice(xy0, len, "xy0")?));
        let opts = SimOptions {
            h: o.h,
            t_final: o.t_final,
            eps: o.eps,
            sustain: o.sustain,
            record_every: None,
            override_collocated: o.override_collocated,
            retry_on_divergence: true,
        };
        let run = simulate(&s.0, &g.0, &init, &opts)?;
        write_out(out, Box::into_raw(Box::new(FormctlRun(run))), "out")
    })
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_run_verdict(run: *const FormctlRun, out: *mut FormctlVerdict) -> FormctlStatus {
    guard(|| {
        let r = deref(run, "run")?;
        write_out(out, r.0.verdict.into(), "out")
    })
}

/// Final positions as `2 * n` coordinates written into `out` (capacity
/// `len`).
///
/// # Safety
/// `run` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn formctl_run_final_positions(run: *const FormctlRun, out: *mut f64, len: usize) -> FormctlStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let p = &r.0.final_state.positions;
        if len < 2 * p.len() {
            return Err(Fail(FormctlStatus::InvalidArgument, format!("need {} slots", 2 * p.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, 2 * p.len());
        for (c, q) in dst.chunks_exact_mut(2).zip(p) {
            c[0] = q.x;
            c[1] = q.y;
        }
        Ok(())
    })
}

/// Largest final distance and area errors.
///
/// # Safety
/// `run` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_run_max_errors(
    run: *const FormctlRun,
    max_abs_z: *mut f64,
    max_abs_s: *mut f64,
) -> FormctlStatus {
    guard(|| {
        let r = deref(run, "run")?;
        write_out(max_abs_z, r.0.final_errors.max_abs_z(), "max_abs_z")?;
        write_out(max_abs_s, r.0.final_errors.max_abs_s(), "max_abs_s")
    })
}

/// Time at which the errors entered and then stayed below `eps`;
/// `FORMCTL_STATUS_UNAVAILABLE` if the run did not converge.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_run_time_to_threshold(run: *const FormctlRun, out: *mut f64) -> FormctlStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let t = r
            .0
            .time_to_threshold
            .ok_or_else(|| Fail(FormctlStatus::Unavailable, "run did not converge".into()))?;
        write_out(out, t, "out")
    })
}

/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn formctl_run_free(run: *mut FormctlRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Signed area of the ordered triangle; positive when counterclockwise.
#[no_mangle]
pub extern "C" fn formctl_signed_area(xi: f64, yi: f64, xj: f64, yj: f64, xk: f64, yk: f64) -> f64 {
    signed_area(&Point::new(xi, yi), &Point::new(xj, yj), &Point::new(xk, yk))
}

/// Gain-ratio bound for a non-isosceles triangle with base `d_ji` and legs
/// `d_kj`, `d_ki`. Writes the raw bound and the admissibility threshold
/// `max(bound, 2)`.
///
/// # Safety
/// Outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_gamma_lower_bound(
    d_ji: f64,
    d_kj: f64,
    d_ki: f64,
    gamma_bar: *mut f64,
    threshold: *mut f64,
) -> FormctlStatus {
    guard(|| {
        let b = gamma_lower_bound(d_ji, d_kj, d_ki)?;
        write_out(gamma_bar, b.gamma_bar, "gamma_bar")?;
        write_out(threshold, b.threshold(), "threshold")
    })
}

/// Whether `a x^4 + b x^3 + c x^2 + d x + e` has a real root.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn formctl_quartic_has_real_root(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    e: f64,
    out: *mut bool,
) -> FormctlStatus {
    guard(|| {
        if ![a, b, c, d, e].iter().all(|v| v.is_finite()) {
            return Err(Fail(FormctlStatus::InvalidArgument, "coefficients must be finite".into()));
        }
        write_out(out, has_real_root(&QuarticCoefficients::new(a, b, c, d, e)), "out")
    })
}
