#ifndef FDG_H
#define FDG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum FdgStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidUtf8 = 2,
  InvalidSpec = 3,
  EvaluationFailed = 4,
  CapExceeded = 5,
  InternalError = 6,
} FdgStatus;

/*
 Opaque handle: a built benchmark problem together with its ground-truth
 decomposition and an evaluation ledger.
 */
typedef struct FdgProblem FdgProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Build a benchmark problem from a JSON spec document.

 # Safety
 `spec_json` must be a valid NUL-terminated string and `out` a valid
 pointer; on `Ok` the caller owns the handle and must release it with
 [`fdg_problem_free`].
 */
enum FdgStatus fdg_problem_from_spec_json(const char *spec_json, struct FdgProblem **out);

/*
 Release a problem handle. A null handle is a no-op.

 # Safety
 `handle` must have been returned by [`fdg_problem_from_spec_json`] and
 not freed before.
 */
void fdg_problem_free(struct FdgProblem *handle);

/*
 Number of decision variables, or 0 for a null handle.

 # Safety
 `handle` must be a live handle or null.
 */
uintptr_t fdg_problem_dimension(const struct FdgProblem *handle);

/*
 Fitness evaluations charged to the handle so far.

 # Safety
 `handle` must be a live handle or null.
 */
uint64_t fdg_problem_fe_count(const struct FdgProblem *handle);

/*
 Evaluate a candidate solution, charging one evaluation to the handle.

 # Safety
 `values` must point to `len` readable doubles; `fitness_out` must be a
 valid pointer.
 */
enum FdgStatus fdg_problem_evaluate(const struct FdgProblem *handle,
                                    const double *values,
                                    uintptr_t len,
                                    double *fitness_out);

/*
 Decompose the problem and return the JSON report as a newly allocated
 string. The caller must release it with [`fdg_string_free`].

 # Safety
 `handle` must be a live handle and `report_json_out` a valid pointer.
 */
enum FdgStatus fdg_decompose(const struct FdgProblem *handle,
                             uint64_t seed,
                             uintptr_t trials,
                             double gap_factor,
                             bool with_oracle,
                             char **report_json_out);

/*
 Release a string returned by this library. A null pointer is a no-op.

 # Safety
 `s` must have been returned by a function of this library and not freed
 before.
 */
void fdg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FDG_H */
