//! C ABI over `freejacobi`.
//!
//! Every function returns an [`FjStatus`]; results are written through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`fj_last_error_message`]. Handles are opaque and must be released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use freejacobi::cli::{self, Command, ConfigFile, ExperimentSpec};
use freejacobi::combinatorics::projection_cumulants;
use freejacobi::matrix_sim::{simulate, SimConfig, SimResult};
use freejacobi::moment_dynamics::{
    integrate_moments, stationary_cdf, stationary_density, stationary_moments_catalan,
    JacobiParams, MomentVector,
};
use freejacobi::scalar::{rational, Scalar};
use freejacobi::word_algebra::verify_expansion;
use freejacobi::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeGuard = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Config = 6,
    Io = 7,
    /// A check of the run failed (see [`fj_run_config_file`]).
    VerificationFailed = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> FjStatus {
    match e {
        Error::SizeGuard { .. } => FjStatus::SizeGuard,
        Error::InvalidParameter(_) | Error::RankMismatch { .. } | Error::Parse(_) => FjStatus::InvalidArgument,
        Error::Config(_) => FjStatus::Config,
        Error::Io(_) | Error::Json(_) => FjStatus::Io,
        _ => FjStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), FjStatus>) -> FjStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FjStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside freejacobi");
            FjStatus::Panic
        }
    }
}

fn fail(e: Error) -> FjStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), FjStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(FjStatus::NullPointer);
    }
    Ok(())
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, FjStatus> {
    non_null(h, "handle")?;
    Ok(&*h)
}

/// Copy `src` into the caller buffer `dst` of length `len`.
unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), FjStatus> {
    non_null(dst, "output buffer")?;
    if len < src.len() {
        set_error(format!("buffer holds {len} values, {} needed", src.len()));
        return Err(FjStatus::BufferTooSmall);
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fj_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fj_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Integrated moments `m_0..m_{n_max}` of the free Jacobi process on a uniform grid.
pub struct FjMoments(MomentVector);

/// Integrate the moment system with `τ(Q) = theta`, `τ(P) = lambda·theta` and
/// `m_n(0) = 1` up to `t_end` with grid spacing at most `dt`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fj_moments_integrate(
    lambda: f64,
    theta: f64,
    n_max: usize,
    t_end: f64,
    dt: f64,
    out: *mut *mut FjMoments,
) -> FjStatus {
    guard(|| {
        non_null(out, "out")?;
        let mut p = JacobiParams::for_k(2, n_max);
        p.k = None;
        p.lambda = lambda;
        p.theta = theta;
        let m = integrate_moments(&p, t_end, dt).map_err(fail)?;
        *out = Box::into_raw(Box::new(FjMoments(m)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`fj_moments_integrate`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fj_moments_free(h: *mut FjMoments) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of grid times and highest order held by the handle.
///
/// # Safety
/// `h` must be a live handle; `times` and `n_max` valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn fj_moments_shape(h: *const FjMoments, times: *mut usize, n_max: *mut usize) -> FjStatus {
    guard(|| {
        let m = &handle(h)?.0;
        non_null(times, "times")?;
        non_null(n_max, "n_max")?;
        *times = m.t_grid.len();
        *n_max = m.n_max();
        Ok(())
    })
}

/// Copy the time grid into `buf` (length `len`).
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fj_moments_times(h: *const FjMoments, buf: *mut f64, len: usize) -> FjStatus {
    guard(|| {
        copy_out(&handle(h)?.0.t_grid, buf, len)
    })
}

/// Copy `m_0..m_{n_max}` at grid index `index` into `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fj_moments_row(h: *const FjMoments, index: usize, buf: *mut f64, len: usize) -> FjStatus {
    guard(|| {
        let m = &handle(h)?.0;
        let row = m.values.get(index).ok_or_else(|| {
            set_error(format!("index {index} outside {} grid times", m.t_grid.len()));
            FjStatus::InvalidArgument
        })?;
        copy_out(row, buf, len)
    })
}

/// Stationary moments `m_0(∞)..m_{n_max}(∞)` for `k` averaged unitaries, rounded to double.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fj_stationary_moments(k: u32, n_max: usize, buf: *mut f64, len: usize) -> FjStatus {
    guard(|| {
        let m = stationary_moments_catalan(k, n_max).map_err(fail)?;
        let v: Vec<f64> = m.iter().map(Scalar::to_f64).collect();
        copy_out(&v, buf, len)
    })
}

/// Density and distribution function of the stationary law at `x`.
///
/// # Safety
/// `density` and `cdf` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn fj_stationary_law(k: u32, x: f64, density: *mut f64, cdf: *mut f64) -> FjStatus {
    guard(|| {
        non_null(density, "density")?;
        non_null(cdf, "cdf")?;
        if k < 2 {
            return Err(fail(Error::InvalidParameter(format!("k = {k} must be at least 2"))));
        }
        *density = stationary_density(k, x);
        *cdf = stationary_cdf(k, x);
        Ok(())
    })
}

/// Free cumulants `κ_1..κ_{n_max}` of a projection of trace `num/den`, rounded to double.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fj_projection_cumulants(num: i64, den: i64, n_max: usize, buf: *mut f64, len: usize) -> FjStatus {
    guard(|| {
        if den == 0 {
            return Err(fail(Error::InvalidParameter("zero denominator".into())));
        }
        let t = projection_cumulants(&rational(num, den), n_max).map_err(fail)?;
        let v = (1..=n_max).map(|n| t.get(n).map(Scalar::to_f64)).collect::<Result<Vec<_>, _>>().map_err(fail)?;
        copy_out(&v, buf, len)
    })
}

/// Check every exact identity of the word expansion up to `n_max`; writes the
/// number of identities checked and the number that failed.
///
/// # Safety
/// `checked` and `failed` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn fj_expansion_verify(n_max: usize, checked: *mut usize, failed: *mut usize) -> FjStatus {
    guard(|| {
        non_null(checked, "checked")?;
        non_null(failed, "failed")?;
        let rep = verify_expansion(n_max).map_err(fail)?;
        *checked = rep.checks;
        *failed = rep.failures.len();
        Ok(())
    })
}

/// Monte Carlo estimates from a finished simulation.
pub struct FjSimulation(SimResult);

/// Simulate `k` unitary Brownian motions on `U(n)` and record `W/k²` moments
/// up to `n_max` at `snapshots` equally spaced times.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fj_simulate_w(
    n: usize,
    k: u32,
    t_end: f64,
    dt: f64,
    trajectories: usize,
    seed: u64,
    n_max: usize,
    snapshots: usize,
    out: *mut *mut FjSimulation,
) -> FjStatus {
    guard(|| {
        non_null(out, "out")?;
        let mut cfg = SimConfig::new(n, k, t_end, dt, trajectories, seed);
        cfg.n_max = n_max;
        cfg.snapshots = snapshots;
        let r = simulate(&cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(FjSimulation(r)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`fj_simulate_w`] and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fj_simulation_free(h: *mut FjSimulation) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of recorded times.
///
/// # Safety
/// `h` must be a live handle and `count` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fj_simulation_snapshots(h: *const FjSimulation, count: *mut usize) -> FjStatus {
    guard(|| {
        let r = &handle(h)?.0;
        non_null(count, "count")?;
        *count = r.snapshots.len();
        Ok(())
    })
}

/// Time, mean and standard error of `Re tr(U)/N` at snapshot `index`.
///
/// # Safety
/// `h` must be a live handle; the out pointers valid and writable.
#[no_mangle]
pub unsafe extern "C" fn fj_simulation_trace_u(h: *const FjSimulation, index: usize, t: *mut f64, mean: *mut f64, se: *mut f64) -> FjStatus {
    guard(|| {
        let r = &handle(h)?.0;
        non_null(t, "t")?;
        non_null(mean, "mean")?;
        non_null(se, "se")?;
        let s = r.snapshots.get(index).ok_or_else(|| {
            set_error(format!("snapshot {index} does not exist"));
            FjStatus::InvalidArgument
        })?;
        *t = s.t;
        *mean = s.trace_u.mean;
        *se = s.trace_u.se;
        Ok(())
    })
}

/// Mean and standard error of `tr((W/k²)^order)/N` at snapshot `index`.
///
/// # Safety
/// `h` must be a live handle; the out pointers valid and writable.
#[no_mangle]
pub unsafe extern "C" fn fj_simulation_w_moment(h: *const FjSimulation, index: usize, order: usize, mean: *mut f64, se: *mut f64) -> FjStatus {
    guard(|| {
        let r = &handle(h)?.0;
        non_null(mean, "mean")?;
        non_null(se, "se")?;
        let e = r
            .snapshots
            .get(index)
            .and_then(|s| order.checked_sub(1).and_then(|o| s.w_moments.get(o)))
            .ok_or_else(|| {
                set_error(format!("no moment of order {order} at snapshot {index}"));
                FjStatus::InvalidArgument
            })?;
        *mean = e.mean;
        *se = e.se;
        Ok(())
    })
}

/// Run a pipeline described by a TOML config file (same format as the
/// command-line tool) into `out_dir` (null: the file's `out` key or the
/// default). Returns `FJ_STATUS_VERIFICATION_FAILED` when a check fails; the
/// artifacts and manifest are written either way.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn fj_run_config_file(config_path: *const c_char, out_dir: *const c_char) -> FjStatus {
    guard(|| {
        non_null(config_path, "config_path")?;
        let utf8 = |p: *const c_char| {
            CStr::from_ptr(p).to_str().map(PathBuf::from).map_err(|_| {
                set_error("path is not valid UTF-8");
                FjStatus::InvalidArgument
            })
        };
        let path = utf8(config_path)?;
        let file = ConfigFile::load(&path).map_err(fail)?;
        let command: Command = file.command.ok_or_else(|| fail(Error::Config("config file names no command".into())))?;
        let params = cli::resolve_params(command, Some(&file), &Default::default()).map_err(fail)?;
        let output_dir = if out_dir.is_null() {
            file.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(command.name()))
        } else {
            utf8(out_dir)?
        };
        let spec = ExperimentSpec { params, output_dir, seed: file.seed.unwrap_or(0), tolerance: file.tolerance };
        let manifest = cli::run(&spec).map_err(fail)?;
        if !manifest.passed {
            let failed: Vec<&str> = manifest.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            set_error(format!("failed checks: {}", failed.join(", ")));
            return Err(FjStatus::VerificationFailed);
        }
        Ok(())
    })
}
