//! C ABI over the `riov` solver.
//!
//! Instances and solutions are opaque handles. Every function returns a
//! [`RiovStatus`] or a nullable pointer; on failure a message is kept in a
//! thread-local slot readable through [`riov_last_error`]. Rationals cross
//! the boundary as `"p/q"` strings that the caller releases with
//! [`riov_string_free`]. Indices are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use riov::cli::{InstanceFile, SolutionReport};
use riov::inverse::{self, SolveResult};
use riov::numeric::{self, Rational};
use riov::subproblem::{eval_psi, InverseInstance};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiovStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidInstance = 5,
    Infeasible = 6,
    IndexOutOfRange = 7,
    BadNumber = 8,
    Panic = 9,
}

/// Validated problem instance.
pub struct RiovInstance {
    inner: InverseInstance,
}

/// Result of [`riov_solve`], optimal or infeasible.
pub struct RiovSolution {
    result: SolveResult,
    report: SolutionReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: RiovStatus, msg: impl Into<String>) -> RiovStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`RiovStatus::Panic`].
fn guard(f: impl FnOnce() -> RiovStatus) -> RiovStatus {
    clear_error();
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "unknown panic".into());
        fail(RiovStatus::Panic, format!("internal error: {msg}"))
    })
}

/// Pointer-returning variant of [`guard`]; panics yield NULL.
fn guard_ptr<T>(f: impl FnOnce() -> *mut T) -> *mut T {
    clear_error();
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal error");
        ptr::null_mut()
    })
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, RiovStatus> {
    if s.is_null() {
        return Err(fail(RiovStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| fail(RiovStatus::InvalidUtf8, e.to_string()))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn rational_to_c(r: Option<&Rational>) -> *mut c_char {
    match r {
        Some(r) => to_c(r.to_string()),
        None => ptr::null_mut(),
    }
}

fn build(text: &str, out: *mut *mut RiovInstance) -> RiovStatus {
    let file = match InstanceFile::parse(text) {
        Ok(f) => f,
        Err(e) => return fail(RiovStatus::Parse, e.to_string()),
    };
    match file.build() {
        Ok(inner) => {
            // SAFETY: checked non-null by the callers.
            unsafe { *out = Box::into_raw(Box::new(RiovInstance { inner })) };
            RiovStatus::Ok
        }
        Err(e) => fail(RiovStatus::InvalidInstance, e.to_string()),
    }
}

/// Parses and validates an instance from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn riov_instance_parse(text: *const c_char, out: *mut *mut RiovInstance) -> RiovStatus {
    guard(|| {
        if out.is_null() {
            return fail(RiovStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        match read_str(text) {
            Ok(t) => build(t, out),
            Err(s) => s,
        }
    })
}

/// Reads an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn riov_instance_load(path: *const c_char, out: *mut *mut RiovInstance) -> RiovStatus {
    guard(|| {
        if out.is_null() {
            return fail(RiovStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let path = match read_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match std::fs::read_to_string(Path::new(path)) {
            Ok(text) => build(&text, out),
            Err(e) => fail(RiovStatus::Io, format!("{path}: {e}")),
        }
    })
}

/// # Safety
/// `inst` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn riov_instance_free(inst: *mut RiovInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of variables, 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn riov_instance_num_vars(inst: *const RiovInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.num_vars())
}

/// Solves the inverse problem. `*out` receives a solution handle for both
/// optimal ([`RiovStatus::Ok`]) and infeasible ([`RiovStatus::Infeasible`])
/// outcomes.
///
/// # Safety
/// `inst` must be a live instance handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn riov_solve(inst: *const RiovInstance, out: *mut *mut RiovSolution) -> RiovStatus {
    guard(|| {
        if out.is_null() {
            return fail(RiovStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(inst) = inst.as_ref() else {
            return fail(RiovStatus::NullPointer, "null instance");
        };
        let result = inverse::solve(&inst.inner);
        let report = SolutionReport::from_result(&result);
        let status = match &result {
            SolveResult::Optimal(_) => RiovStatus::Ok,
            SolveResult::Infeasible(e) => fail(RiovStatus::Infeasible, e.to_string()),
        };
        *out = Box::into_raw(Box::new(RiovSolution { result, report }));
        status
    })
}

/// # Safety
/// `sol` must come from [`riov_solve`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_free(sol: *mut RiovSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be NULL or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_is_optimal(sol: *const RiovSolution) -> bool {
    sol.as_ref().is_some_and(|s| matches!(s.result, SolveResult::Optimal(_)))
}

/// Critical value `z*` as `"p/q"`, NULL when infeasible.
///
/// # Safety
/// `sol` must be NULL or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_z_star(sol: *const RiovSolution) -> *mut c_char {
    guard_ptr(|| rational_to_c(sol.as_ref().and_then(|s| s.report.z_star.as_ref())))
}

/// Weighted l1 distance `Σ d_j |c*_j − c_j|`, NULL when infeasible.
///
/// # Safety
/// `sol` must be NULL or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_objective(sol: *const RiovSolution) -> *mut c_char {
    guard_ptr(|| rational_to_c(sol.as_ref().and_then(|s| s.report.objective.as_ref())))
}

/// Adjusted cost `c*_j`.
///
/// # Safety
/// `sol` must be a live solution handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_c_star(sol: *const RiovSolution, j: usize, out: *mut *mut c_char) -> RiovStatus {
    guard(|| {
        if out.is_null() {
            return fail(RiovStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(sol) = sol.as_ref() else {
            return fail(RiovStatus::NullPointer, "null solution");
        };
        match sol.report.c_star.get(j) {
            Some(c) => {
                *out = to_c(c.to_string());
                RiovStatus::Ok
            }
            None => fail(RiovStatus::IndexOutOfRange, format!("index {j} with {} costs", sol.report.c_star.len())),
        }
    })
}

/// Outcome label such as `"turning-midpoint"` or `"infeasible-left"`.
///
/// # Safety
/// `sol` must be NULL or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_case(sol: *const RiovSolution) -> *mut c_char {
    guard_ptr(|| sol.as_ref().map_or(ptr::null_mut(), |s| to_c(s.report.case.clone())))
}

/// Full key/value report, as written by `riov solve`.
///
/// # Safety
/// `sol` must be NULL or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_report(sol: *const RiovSolution) -> *mut c_char {
    guard_ptr(|| sol.as_ref().map_or(ptr::null_mut(), |s| to_c(s.report.to_text())))
}

/// Main-loop iterations, 0 when infeasible.
///
/// # Safety
/// `sol` must be NULL or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn riov_solution_iterations(sol: *const RiovSolution) -> u32 {
    sol.as_ref().and_then(|s| s.report.iterations).unwrap_or(0)
}

/// ψ(z) for `z` given as `"p/q"`. Returns [`RiovStatus::Infeasible`] with
/// `*out` NULL outside the feasible range.
///
/// # Safety
/// `inst` must be a live instance handle, `z` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn riov_eval_psi(inst: *const RiovInstance, z: *const c_char, out: *mut *mut c_char) -> RiovStatus {
    guard(|| {
        if out.is_null() {
            return fail(RiovStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(inst) = inst.as_ref() else {
            return fail(RiovStatus::NullPointer, "null instance");
        };
        let z = match read_str(z).map(numeric::parse) {
            Ok(Ok(z)) => z,
            Ok(Err(e)) => return fail(RiovStatus::BadNumber, e.to_string()),
            Err(s) => return s,
        };
        match eval_psi(&inst.inner, &z).psi() {
            Some(p) => {
                *out = to_c(p.to_string());
                RiovStatus::Ok
            }
            None => fail(RiovStatus::Infeasible, format!("sub-problem infeasible at z = {z}")),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn riov_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, NULL if the last call
/// succeeded. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn riov_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_status_codes() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, RiovStatus::Panic);
        let msg = unsafe { CStr::from_ptr(riov_last_error()) }.to_str().unwrap();
        assert_eq!(msg, "internal error: boom");
        assert_eq!(guard(|| RiovStatus::Ok), RiovStatus::Ok);
        assert!(riov_last_error().is_null());
    }
}
