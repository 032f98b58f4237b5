//! C ABI over the decomposition library: opaque problem handles, status
//! codes, and JSON strings for structured results.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use fdg_core::analysis::{nmi, pairwise_oracle, DEFAULT_ORACLE_CAP};
use fdg_core::benchmarks::{build, BenchmarkSpec};
use fdg_core::problem::EvaluationLedger;
use fdg_core::{decompose, Decomposition, FdgConfig, FdgError, ObjectiveProblem};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FdgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidSpec = 3,
    EvaluationFailed = 4,
    CapExceeded = 5,
    InternalError = 6,
}

/// Opaque handle: a built benchmark problem together with its ground-truth
/// decomposition and an evaluation ledger.
pub struct FdgProblem {
    problem: ObjectiveProblem,
    ground_truth: Decomposition,
    ledger: EvaluationLedger,
}

fn status_for(err: &FdgError) -> FdgStatus {
    match err {
        FdgError::InvalidSpec(_) => FdgStatus::InvalidSpec,
        FdgError::OracleCapExceeded { .. } => FdgStatus::CapExceeded,
        FdgError::DimensionMismatch { .. } | FdgError::OutOfBounds { .. } => {
            FdgStatus::EvaluationFailed
        }
        _ => FdgStatus::InternalError,
    }
}

unsafe fn spec_from_ptr(spec_json: *const c_char) -> Result<BenchmarkSpec, FdgStatus> {
    if spec_json.is_null() {
        return Err(FdgStatus::NullPointer);
    }
    let text = CStr::from_ptr(spec_json)
        .to_str()
        .map_err(|_| FdgStatus::InvalidUtf8)?;
    serde_json::from_str(text).map_err(|_| FdgStatus::InvalidSpec)
}

fn string_out(value: String, out: *mut *mut c_char) -> FdgStatus {
    match CString::new(value) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            FdgStatus::Ok
        }
        Err(_) => FdgStatus::InternalError,
    }
}

/// Build a benchmark problem from a JSON spec document.
///
/// # Safety
/// `spec_json` must be a valid NUL-terminated string and `out` a valid
/// pointer; on `Ok` the caller owns the handle and must release it with
/// [`fdg_problem_free`].
#[no_mangle]
pub unsafe extern "C" fn fdg_problem_from_spec_json(
    spec_json: *const c_char,
    out: *mut *mut FdgProblem,
) -> FdgStatus {
    if out.is_null() {
        return FdgStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let spec = match spec_from_ptr(spec_json) {
        Ok(spec) => spec,
        Err(status) => return status,
    };
    match build(&spec) {
        Ok((problem, ground_truth)) => {
            let handle = Box::new(FdgProblem {
                problem,
                ground_truth,
                ledger: EvaluationLedger::new(),
            });
            *out = Box::into_raw(handle);
            FdgStatus::Ok
        }
        Err(e) => status_for(&e),
    }
}

/// Release a problem handle. A null handle is a no-op.
///
/// # Safety
/// `handle` must have been returned by [`fdg_problem_from_spec_json`] and
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn fdg_problem_free(handle: *mut FdgProblem) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of decision variables, or 0 for a null handle.
///
/// # Safety
/// `handle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fdg_problem_dimension(handle: *const FdgProblem) -> usize {
    handle.as_ref().map_or(0, |h| h.problem.dimension())
}

/// Fitness evaluations charged to the handle so far.
///
/// # Safety
/// `handle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fdg_problem_fe_count(handle: *const FdgProblem) -> u64 {
    handle.as_ref().map_or(0, |h| h.ledger.count())
}

/// Evaluate a candidate solution, charging one evaluation to the handle.
///
/// # Safety
/// `values` must point to `len` readable doubles; `fitness_out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdg_problem_evaluate(
    handle: *const FdgProblem,
    values: *const f64,
    len: usize,
    fitness_out: *mut f64,
) -> FdgStatus {
    let Some(handle) = handle.as_ref() else {
        return FdgStatus::NullPointer;
    };
    if values.is_null() || fitness_out.is_null() {
        return FdgStatus::NullPointer;
    }
    let slice = std::slice::from_raw_parts(values, len);
    match handle.problem.evaluate(&handle.ledger, slice) {
        Ok(fitness) => {
            *fitness_out = fitness;
            FdgStatus::Ok
        }
        Err(e) => status_for(&e),
    }
}

fn decomposition_report(
    handle: &FdgProblem,
    seed: u64,
    trials: usize,
    gap_factor: f64,
    with_oracle: bool,
) -> Result<String, FdgStatus> {
    let config = FdgConfig {
        trials,
        gap_factor,
        ..FdgConfig::default()
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let outcome = decompose(&handle.problem, &handle.ledger, &config, &mut rng)
        .map_err(|e| status_for(&e))?;
    let n = handle.problem.dimension();
    let nmi_vs_ground_truth = nmi(&outcome.decomposition, &handle.ground_truth, n)
        .map_err(|e| status_for(&e))?;
    let nmi_vs_oracle = if with_oracle {
        let side = EvaluationLedger::new();
        let oracle = pairwise_oracle(&handle.problem, &side, DEFAULT_ORACLE_CAP, gap_factor)
            .map_err(|e| status_for(&e))?;
        Some(nmi(&outcome.decomposition, &oracle, n).map_err(|e| status_for(&e))?)
    } else {
        None
    };
    let report = serde_json::json!({
        "type": outcome.trace.kind,
        "nonseps": outcome.decomposition.nonseps,
        "seps": outcome.decomposition.seps,
        "feNum": outcome.fe_num,
        "thresholds": outcome.trace.thresholds,
        "nmi_vs_ground_truth": nmi_vs_ground_truth,
        "nmi_vs_oracle": nmi_vs_oracle,
        "trace": outcome.trace,
    });
    serde_json::to_string_pretty(&report).map_err(|_| FdgStatus::InternalError)
}

/// Decompose the problem and return the JSON report as a newly allocated
/// string. The caller must release it with [`fdg_string_free`].
///
/// # Safety
/// `handle` must be a live handle and `report_json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fdg_decompose(
    handle: *const FdgProblem,
    seed: u64,
    trials: usize,
    gap_factor: f64,
    with_oracle: bool,
    report_json_out: *mut *mut c_char,
) -> FdgStatus {
    let Some(handle) = handle.as_ref() else {
        return FdgStatus::NullPointer;
    };
    if report_json_out.is_null() {
        return FdgStatus::NullPointer;
    }
    *report_json_out = ptr::null_mut();
    match decomposition_report(handle, seed, trials, gap_factor, with_oracle) {
        Ok(report) => string_out(report, report_json_out),
        Err(status) => status,
    }
}

/// Release a string returned by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must have been returned by a function of this library and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn fdg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn spec_cstring() -> CString {
        CString::new(
            r#"{"family":"group-schwefel","n":20,"k":2,"s":5,"permutation_seed":3,"shift_seed":4}"#,
        )
        .unwrap()
    }

    #[test]
    fn round_trip_through_the_c_surface() {
        unsafe {
            let mut handle: *mut FdgProblem = ptr::null_mut();
            let status = fdg_problem_from_spec_json(spec_cstring().as_ptr(), &mut handle);
            assert_eq!(status, FdgStatus::Ok);
            assert_eq!(fdg_problem_dimension(handle), 20);

            let values = vec![0.0f64; 20];
            let mut fitness = 0.0f64;
            let status = fdg_problem_evaluate(handle, values.as_ptr(), 20, &mut fitness);
            assert_eq!(status, FdgStatus::Ok);
            assert_eq!(fdg_problem_fe_count(handle), 1);

            let mut report: *mut c_char = ptr::null_mut();
            let status = fdg_decompose(handle, 7, 10, 1000.0, true, &mut report);
            assert_eq!(status, FdgStatus::Ok);
            let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
            let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(parsed["type"], "ps");
            assert_eq!(parsed["nmi_vs_ground_truth"], 100.0);
            assert_eq!(parsed["nmi_vs_oracle"], 100.0);

            fdg_string_free(report);
            fdg_problem_free(handle);
        }
    }

    #[test]
    fn null_and_invalid_inputs_are_rejected() {
        unsafe {
            let mut handle: *mut FdgProblem = ptr::null_mut();
            assert_eq!(
                fdg_problem_from_spec_json(ptr::null(), &mut handle),
                FdgStatus::NullPointer
            );
            let bad = CString::new("{\"family\":\"sum-of-squares\"}").unwrap();
            assert_eq!(
                fdg_problem_from_spec_json(bad.as_ptr(), &mut handle),
                FdgStatus::InvalidSpec
            );
            let wrong_structure =
                CString::new("{\"family\":\"group-schwefel\",\"n\":9,\"k\":2,\"s\":5}").unwrap();
            assert_eq!(
                fdg_problem_from_spec_json(wrong_structure.as_ptr(), &mut handle),
                FdgStatus::InvalidSpec
            );

            let spec = spec_cstring();
            assert_eq!(
                fdg_problem_from_spec_json(spec.as_ptr(), &mut handle),
                FdgStatus::Ok
            );
            let mut fitness = 0.0;
            let too_short = [0.0f64; 3];
            assert_eq!(
                fdg_problem_evaluate(handle, too_short.as_ptr(), 3, &mut fitness),
                FdgStatus::EvaluationFailed
            );
            assert_eq!(fdg_problem_fe_count(handle), 0);
            fdg_problem_free(handle);
            fdg_problem_free(ptr::null_mut());
            fdg_string_free(ptr::null_mut());
        }
    }
}
