#ifndef URYSOHN_CAPI_H
#define URYSOHN_CAPI_H

/* Generated by cbindgen from urysohn-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ury_status {
  URY_STATUS_OK = 0,
  /**
   * A pointer was null, a number was out of range, or handles don't fit
   * together.
   */
  URY_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The registry has no problem with the requested name.
   */
  URY_STATUS_UNKNOWN_PROBLEM = 2,
  /**
   * Newton's method did not converge.
   */
  URY_STATUS_NON_CONVERGENCE = 3,
  /**
   * The Newton matrix was numerically singular.
   */
  URY_STATUS_SINGULAR_SYSTEM = 4,
  /**
   * An experiment configuration was rejected.
   */
  URY_STATUS_CONFIG_ERROR = 5,
  /**
   * An unexpected internal failure (a panic was caught at the boundary).
   */
  URY_STATUS_INTERNAL = 6,
} ury_status;

/**
 * An integral-equation problem: kernel, kernel derivative, right-hand side
 * and optionally the exact solution.
 */
typedef struct ury_problem ury_problem;

/**
 * One solve on a fixed mesh pair: the modified projection solution together
 * with its iterated refinement and the Nyström solution, all evaluable on
 * [0,1].
 */
typedef struct ury_solution ury_solution;

/**
 * Kernel callback: receives (s, t, u) and the context pointer passed at
 * problem creation.
 */
typedef double (*ury_kernel_fn)(double s, double t, double u, void *context);

/**
 * Scalar-function callback: receives s in [0,1] and the context pointer.
 */
typedef double (*ury_function_fn)(double s, void *context);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Look up a built-in problem by name (see the library's problem registry;
 * `"inverse-sum"` and `"linear-half"` ship by default).
 *
 * # Safety
 * `name` must point to a NUL-terminated string and `out` must be a valid
 * pointer; on success `*out` owns the problem until [`ury_problem_free`].
 */
enum ury_status ury_problem_from_registry(const char *name, struct ury_problem **out);

/**
 * Build a problem from C callbacks. `exact_solution` may be null when no
 * reference solution exists. The context pointer is passed through to every
 * callback invocation.
 *
 * # Safety
 * The callbacks must stay valid for the problem's lifetime, tolerate being
 * called from any thread, and `context` must remain valid and safe to share
 * across threads for as long as the problem (or any solution created from
 * it) is alive.
 */
enum ury_status ury_problem_from_callbacks(ury_kernel_fn kappa,
                                           ury_kernel_fn dkappa_du,
                                           ury_function_fn rhs,
                                           ury_function_fn exact_solution,
                                           void *context,
                                           struct ury_problem **out);

/**
 * Release a problem handle. Null is allowed.
 *
 * # Safety
 * `problem` must be a pointer returned by this library and not yet freed.
 */
void ury_problem_free(struct ury_problem *problem);

/**
 * Solve the modified projection equation on a mesh pair: a composite
 * `quad_rho`-point Gauss rule on `m` subintervals and `r` collocation points
 * on each of `n` subintervals. `m` must be a positive multiple of `n`.
 * Passing 0 for `newton_tol` or `newton_max_iters` selects the defaults
 * (1e-13, 50).
 *
 * # Safety
 * `problem` must be a live handle from this library and `out` a valid
 * pointer; on success `*out` owns the solution until [`ury_solution_free`].
 */
enum ury_status ury_solve(const struct ury_problem *problem,
                          size_t quad_rho,
                          size_t m,
                          size_t r,
                          size_t n,
                          double newton_tol,
                          size_t newton_max_iters,
                          struct ury_solution **out);

/**
 * Release a solution handle. Null is allowed.
 *
 * # Safety
 * `solution` must be a pointer returned by this library and not yet freed.
 */
void ury_solution_free(struct ury_solution *solution);

/**
 * Evaluate the modified projection solution at `s` in [0,1].
 *
 * # Safety
 * `solution` must be a live handle from this library and `out` valid.
 */
enum ury_status ury_solution_eval_modified(const struct ury_solution *solution,
                                           double s,
                                           double *out);

/**
 * Evaluate the iterated solution at `s` in [0,1].
 *
 * # Safety
 * `solution` must be a live handle from this library and `out` valid.
 */
enum ury_status ury_solution_eval_iterated(const struct ury_solution *solution,
                                           double s,
                                           double *out);

/**
 * Evaluate the Nyström solution at `s` in [0,1].
 *
 * # Safety
 * `solution` must be a live handle from this library and `out` valid.
 */
enum ury_status ury_solution_eval_nystrom(const struct ury_solution *solution,
                                          double s,
                                          double *out);

/**
 * Number of Newton iterations the modified-projection solve used, or 0 for
 * a null handle.
 *
 * # Safety
 * `solution` must be null or a live handle from this library.
 */
size_t ury_solution_newton_iterations(const struct ury_solution *solution);

/**
 * Mesh parameters of a solution; any out pointer may be null to skip it.
 *
 * # Safety
 * `solution` must be a live handle; non-null out pointers must be valid.
 */
enum ury_status ury_solution_mesh(const struct ury_solution *solution,
                                  size_t *m_out,
                                  size_t *n_out,
                                  size_t *r_out);

/**
 * Richardson extrapolation of two iterated solutions at mesh counts n and
 * 2n, evaluated at `s`. The handles must share r, and `fine` must have
 * exactly twice the collocation mesh count of `coarse`.
 *
 * # Safety
 * Both solutions must be live handles from this library and `out` valid.
 */
enum ury_status ury_richardson_eval(const struct ury_solution *coarse,
                                    const struct ury_solution *fine,
                                    double s,
                                    double *out);

/**
 * Run a built-in experiment preset and return its CSV report as a
 * NUL-terminated string owned by the caller (release it with
 * [`ury_string_free`]).
 *
 * # Safety
 * `name` must point to a NUL-terminated string and `out` must be valid.
 */
enum ury_status ury_run_preset_csv(const char *name, bool full_precision, char **out);

/**
 * Run an experiment from a JSON configuration (same schema as the CLI's
 * `--config` file) and return its CSV report as a NUL-terminated string
 * owned by the caller.
 *
 * # Safety
 * `json` must point to a NUL-terminated string and `out` must be valid.
 */
enum ury_status ury_run_config_csv(const char *json, bool full_precision, char **out);

/**
 * Release a string returned by this library. Null is allowed.
 *
 * # Safety
 * `text` must be a string returned by this library and not yet freed.
 */
void ury_string_free(char *text);

/**
 * Static name of a status code.
 */
const char *ury_status_name(enum ury_status status);

/**
 * Copy the calling thread's most recent error message into `buffer` (always
 * NUL-terminated when `capacity > 0`) and return the full message length in
 * bytes, excluding the NUL. Call with a null buffer to query the length.
 *
 * # Safety
 * When non-null, `buffer` must point to at least `capacity` writable bytes.
 */
size_t ury_last_error_message(char *buffer, size_t capacity);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* URYSOHN_CAPI_H */
