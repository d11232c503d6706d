//! C ABI for the urysohn solver library.
//!
//! Handles are opaque pointers created and destroyed by this library; every
//! fallible call returns a [`ury_status`] code and writes its result through
//! an out pointer. A human-readable description of the most recent error on
//! the calling thread is available from [`ury_last_error_message`]. The
//! matching C header is generated into `include/urysohn.h` at build time.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use urysohn::experiment::{preset, run_experiment, ExperimentConfig, ExperimentError};
use urysohn::operator::UrysohnProblem;
use urysohn::projection::CollocationGrid;
use urysohn::quadrature::{CompositeQuadrature, QuadratureRule};
use urysohn::solver::{
    richardson, solve_modified_projection, NewtonSettings, SolutionBundle, SolveError,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ury_status {
    Ok = 0,
    /// A pointer was null, a number was out of range, or handles don't fit
    /// together.
    InvalidArgument = 1,
    /// The registry has no problem with the requested name.
    UnknownProblem = 2,
    /// Newton's method did not converge.
    NonConvergence = 3,
    /// The Newton matrix was numerically singular.
    SingularSystem = 4,
    /// An experiment configuration was rejected.
    ConfigError = 5,
    /// An unexpected internal failure (a panic was caught at the boundary).
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = RefCell::new(String::new());
}

fn fail(status: ury_status, message: impl Into<String>) -> ury_status {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
    status
}

fn ok() -> ury_status {
    LAST_ERROR.with(|slot| slot.borrow_mut().clear());
    ury_status::Ok
}

fn solve_status(err: &SolveError) -> ury_status {
    match err {
        SolveError::NonConvergence { .. } => ury_status::NonConvergence,
        SolveError::SingularLinearSystem(_) => ury_status::SingularSystem,
        _ => ury_status::InvalidArgument,
    }
}

/// Runs a closure, converting panics into `Internal` so they never unwind
/// across the C boundary.
fn guarded(body: impl FnOnce() -> ury_status) -> ury_status {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic at the library boundary".into());
            fail(ury_status::Internal, message)
        }
    }
}

/// An integral-equation problem: kernel, kernel derivative, right-hand side
/// and optionally the exact solution.
pub struct ury_problem {
    inner: UrysohnProblem,
}

/// One solve on a fixed mesh pair: the modified projection solution together
/// with its iterated refinement and the Nyström solution, all evaluable on
/// [0,1].
pub struct ury_solution {
    bundle: SolutionBundle,
}

/// Kernel callback: receives (s, t, u) and the context pointer passed at
/// problem creation.
pub type ury_kernel_fn =
    Option<unsafe extern "C" fn(s: f64, t: f64, u: f64, context: *mut c_void) -> f64>;

/// Scalar-function callback: receives s in [0,1] and the context pointer.
pub type ury_function_fn = Option<unsafe extern "C" fn(s: f64, context: *mut c_void) -> f64>;

struct Callback<F> {
    f: F,
    context: *mut c_void,
}

// The caller promises the context is safe to use from any thread for the
// problem's lifetime; see ury_problem_from_callbacks.
unsafe impl<F> Send for Callback<F> {}
unsafe impl<F> Sync for Callback<F> {}

/// Look up a built-in problem by name (see the library's problem registry;
/// `"inverse-sum"` and `"linear-half"` ship by default).
///
/// # Safety
/// `name` must point to a NUL-terminated string and `out` must be a valid
/// pointer; on success `*out` owns the problem until [`ury_problem_free`].
#[no_mangle]
pub unsafe extern "C" fn ury_problem_from_registry(
    name: *const c_char,
    out: *mut *mut ury_problem,
) -> ury_status {
    guarded(|| {
        if name.is_null() || out.is_null() {
            return fail(ury_status::InvalidArgument, "null pointer argument");
        }
        let name = match unsafe { CStr::from_ptr(name) }.to_str() {
            Ok(name) => name,
            Err(_) => return fail(ury_status::InvalidArgument, "name is not valid UTF-8"),
        };
        match urysohn::problems::by_name(name) {
            Some(inner) => {
                unsafe { *out = Box::into_raw(Box::new(ury_problem { inner })) };
                ok()
            }
            None => fail(
                ury_status::UnknownProblem,
                format!("unknown problem '{name}'"),
            ),
        }
    })
}

/// Build a problem from C callbacks. `exact_solution` may be null when no
/// reference solution exists. The context pointer is passed through to every
/// callback invocation.
///
/// # Safety
/// The callbacks must stay valid for the problem's lifetime, tolerate being
/// called from any thread, and `context` must remain valid and safe to share
/// across threads for as long as the problem (or any solution created from
/// it) is alive.
#[no_mangle]
pub unsafe extern "C" fn ury_problem_from_callbacks(
    kappa: ury_kernel_fn,
    dkappa_du: ury_kernel_fn,
    rhs: ury_function_fn,
    exact_solution: ury_function_fn,
    context: *mut c_void,
    out: *mut *mut ury_problem,
) -> ury_status {
    guarded(|| {
        if out.is_null() {
            return fail(ury_status::InvalidArgument, "null out pointer");
        }
        let (Some(kappa), Some(dkappa_du), Some(rhs)) = (kappa, dkappa_du, rhs) else {
            return fail(
                ury_status::InvalidArgument,
                "kappa, dkappa_du and rhs callbacks are required",
            );
        };
        let kernel = Callback { f: kappa, context };
        let derivative = Callback {
            f: dkappa_du,
            context,
        };
        let rhs = Callback { f: rhs, context };
        let mut inner = UrysohnProblem::new(
            move |s, t, u| unsafe { (kernel.f)(s, t, u, kernel.context) },
            move |s, t, u| unsafe { (derivative.f)(s, t, u, derivative.context) },
            move |s| unsafe { (rhs.f)(s, rhs.context) },
        );
        if let Some(exact) = exact_solution {
            let exact = Callback { f: exact, context };
            inner = inner.with_exact_solution(move |s| unsafe { (exact.f)(s, exact.context) });
        }
        unsafe { *out = Box::into_raw(Box::new(ury_problem { inner })) };
        ok()
    })
}

/// Release a problem handle. Null is allowed.
///
/// # Safety
/// `problem` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ury_problem_free(problem: *mut ury_problem) {
    if !problem.is_null() {
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Solve the modified projection equation on a mesh pair: a composite
/// `quad_rho`-point Gauss rule on `m` subintervals and `r` collocation points
/// on each of `n` subintervals. `m` must be a positive multiple of `n`.
/// Passing 0 for `newton_tol` or `newton_max_iters` selects the defaults
/// (1e-13, 50).
///
/// # Safety
/// `problem` must be a live handle from this library and `out` a valid
/// pointer; on success `*out` owns the solution until [`ury_solution_free`].
#[no_mangle]
pub unsafe extern "C" fn ury_solve(
    problem: *const ury_problem,
    quad_rho: usize,
    m: usize,
    r: usize,
    n: usize,
    newton_tol: f64,
    newton_max_iters: usize,
    out: *mut *mut ury_solution,
) -> ury_status {
    guarded(|| {
        if problem.is_null() || out.is_null() {
            return fail(ury_status::InvalidArgument, "null pointer argument");
        }
        let problem = unsafe { &*problem };
        let base = match QuadratureRule::gauss_legendre(quad_rho) {
            Ok(base) => base,
            Err(e) => return fail(ury_status::InvalidArgument, e.to_string()),
        };
        let quad = match CompositeQuadrature::new(base, m) {
            Ok(quad) => quad,
            Err(e) => return fail(ury_status::InvalidArgument, e.to_string()),
        };
        let grid = match CollocationGrid::new(n, r) {
            Ok(grid) => grid,
            Err(e) => return fail(ury_status::InvalidArgument, e.to_string()),
        };
        let defaults = NewtonSettings::default();
        let settings = NewtonSettings {
            tol: if newton_tol > 0.0 {
                newton_tol
            } else {
                defaults.tol
            },
            max_iters: if newton_max_iters > 0 {
                newton_max_iters
            } else {
                defaults.max_iters
            },
            ..defaults
        };
        match solve_modified_projection(&problem.inner, &quad, &grid, &settings) {
            Ok(bundle) => {
                unsafe { *out = Box::into_raw(Box::new(ury_solution { bundle })) };
                ok()
            }
            Err(e) => fail(solve_status(&e), e.to_string()),
        }
    })
}

/// Release a solution handle. Null is allowed.
///
/// # Safety
/// `solution` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ury_solution_free(solution: *mut ury_solution) {
    if !solution.is_null() {
        drop(unsafe { Box::from_raw(solution) });
    }
}

unsafe fn eval_with(
    solution: *const ury_solution,
    s: f64,
    out: *mut f64,
    f: impl Fn(&SolutionBundle, f64) -> f64,
) -> ury_status {
    guarded(|| {
        if solution.is_null() || out.is_null() {
            return fail(ury_status::InvalidArgument, "null pointer argument");
        }
        if !(0.0..=1.0).contains(&s) {
            return fail(
                ury_status::InvalidArgument,
                format!("evaluation point {s} outside [0,1]"),
            );
        }
        let bundle = unsafe { &(*solution).bundle };
        unsafe { *out = f(bundle, s) };
        ok()
    })
}

/// Evaluate the modified projection solution at `s` in [0,1].
///
/// # Safety
/// `solution` must be a live handle from this library and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ury_solution_eval_modified(
    solution: *const ury_solution,
    s: f64,
    out: *mut f64,
) -> ury_status {
    unsafe { eval_with(solution, s, out, |b, s| b.eval_modified(s)) }
}

/// Evaluate the iterated solution at `s` in [0,1].
///
/// # Safety
/// `solution` must be a live handle from this library and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ury_solution_eval_iterated(
    solution: *const ury_solution,
    s: f64,
    out: *mut f64,
) -> ury_status {
    unsafe { eval_with(solution, s, out, |b, s| b.eval_iterated(s)) }
}

/// Evaluate the Nyström solution at `s` in [0,1].
///
/// # Safety
/// `solution` must be a live handle from this library and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ury_solution_eval_nystrom(
    solution: *const ury_solution,
    s: f64,
    out: *mut f64,
) -> ury_status {
    unsafe { eval_with(solution, s, out, |b, s| b.eval_nystrom(s)) }
}

/// Number of Newton iterations the modified-projection solve used, or 0 for
/// a null handle.
///
/// # Safety
/// `solution` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ury_solution_newton_iterations(
    solution: *const ury_solution,
) -> usize {
    if solution.is_null() {
        return 0;
    }
    unsafe { &*solution }.bundle.newton_report().iterations
}

/// Mesh parameters of a solution; any out pointer may be null to skip it.
///
/// # Safety
/// `solution` must be a live handle; non-null out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ury_solution_mesh(
    solution: *const ury_solution,
    m_out: *mut usize,
    n_out: *mut usize,
    r_out: *mut usize,
) -> ury_status {
    guarded(|| {
        if solution.is_null() {
            return fail(ury_status::InvalidArgument, "null solution handle");
        }
        let bundle = unsafe { &(*solution).bundle };
        if !m_out.is_null() {
            unsafe { *m_out = bundle.quad().m() };
        }
        if !n_out.is_null() {
            unsafe { *n_out = bundle.grid().n() };
        }
        if !r_out.is_null() {
            unsafe { *r_out = bundle.grid().r() };
        }
        ok()
    })
}

/// Richardson extrapolation of two iterated solutions at mesh counts n and
/// 2n, evaluated at `s`. The handles must share r, and `fine` must have
/// exactly twice the collocation mesh count of `coarse`.
///
/// # Safety
/// Both solutions must be live handles from this library and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ury_richardson_eval(
    coarse: *const ury_solution,
    fine: *const ury_solution,
    s: f64,
    out: *mut f64,
) -> ury_status {
    guarded(|| {
        if coarse.is_null() || fine.is_null() || out.is_null() {
            return fail(ury_status::InvalidArgument, "null pointer argument");
        }
        if !(0.0..=1.0).contains(&s) {
            return fail(
                ury_status::InvalidArgument,
                format!("evaluation point {s} outside [0,1]"),
            );
        }
        let coarse = unsafe { &(*coarse).bundle };
        let fine = unsafe { &(*fine).bundle };
        let r = coarse.grid().r();
        if fine.grid().r() != r {
            return fail(
                ury_status::InvalidArgument,
                "solutions use different collocation orders",
            );
        }
        if fine.grid().n() != 2 * coarse.grid().n() {
            return fail(
                ury_status::InvalidArgument,
                format!(
                    "mesh counts must double: coarse n = {}, fine n = {}",
                    coarse.grid().n(),
                    fine.grid().n()
                ),
            );
        }
        let extrap = richardson(|x| coarse.eval_iterated(x), |x| fine.eval_iterated(x), r);
        unsafe { *out = extrap(s) };
        ok()
    })
}

fn report_to_cstring(
    result: Result<urysohn::experiment::ConvergenceReport, ExperimentError>,
    full_precision: bool,
    out: *mut *mut c_char,
) -> ury_status {
    let report = match result {
        Ok(report) => report,
        Err(err) => {
            let status = match &err {
                ExperimentError::UnknownProblem(_) => ury_status::UnknownProblem,
                ExperimentError::Solve { source, .. } => solve_status(source),
                _ => ury_status::ConfigError,
            };
            return fail(status, err.to_string());
        }
    };
    match CString::new(report.to_csv(full_precision)) {
        Ok(text) => {
            unsafe { *out = text.into_raw() };
            ok()
        }
        Err(_) => fail(ury_status::Internal, "report contained a NUL byte"),
    }
}

/// Run a built-in experiment preset and return its CSV report as a
/// NUL-terminated string owned by the caller (release it with
/// [`ury_string_free`]).
///
/// # Safety
/// `name` must point to a NUL-terminated string and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ury_run_preset_csv(
    name: *const c_char,
    full_precision: bool,
    out: *mut *mut c_char,
) -> ury_status {
    guarded(|| {
        if name.is_null() || out.is_null() {
            return fail(ury_status::InvalidArgument, "null pointer argument");
        }
        let name = match unsafe { CStr::from_ptr(name) }.to_str() {
            Ok(name) => name,
            Err(_) => return fail(ury_status::InvalidArgument, "name is not valid UTF-8"),
        };
        let Some(config) = preset(name) else {
            return fail(ury_status::ConfigError, format!("unknown preset '{name}'"));
        };
        report_to_cstring(run_experiment(&config), full_precision, out)
    })
}

/// Run an experiment from a JSON configuration (same schema as the CLI's
/// `--config` file) and return its CSV report as a NUL-terminated string
/// owned by the caller.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ury_run_config_csv(
    json: *const c_char,
    full_precision: bool,
    out: *mut *mut c_char,
) -> ury_status {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(ury_status::InvalidArgument, "null pointer argument");
        }
        let json = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(json) => json,
            Err(_) => return fail(ury_status::InvalidArgument, "config is not valid UTF-8"),
        };
        let config = match ExperimentConfig::from_json(json) {
            Ok(config) => config,
            Err(err) => return fail(ury_status::ConfigError, err.to_string()),
        };
        report_to_cstring(run_experiment(&config), full_precision, out)
    })
}

/// Release a string returned by this library. Null is allowed.
///
/// # Safety
/// `text` must be a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ury_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ury_status_name(status: ury_status) -> *const c_char {
    let name: &'static str = match status {
        ury_status::Ok => "ok\0",
        ury_status::InvalidArgument => "invalid argument\0",
        ury_status::UnknownProblem => "unknown problem\0",
        ury_status::NonConvergence => "newton did not converge\0",
        ury_status::SingularSystem => "singular linear system\0",
        ury_status::ConfigError => "configuration error\0",
        ury_status::Internal => "internal error\0",
    };
    name.as_ptr().cast()
}

/// Copy the calling thread's most recent error message into `buffer` (always
/// NUL-terminated when `capacity > 0`) and return the full message length in
/// bytes, excluding the NUL. Call with a null buffer to query the length.
///
/// # Safety
/// When non-null, `buffer` must point to at least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ury_last_error_message(
    buffer: *mut c_char,
    capacity: usize,
) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer.cast::<u8>(), n);
                *buffer.add(n) = 0;
            }
        }
        bytes.len()
    })
}
