#ifndef OPTSCALE_H
#define OPTSCALE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define OS_COST_EUCLID 0

#define OS_COST_MAX 1

#define OS_THETA_EUCL 0

#define OS_THETA_TEST 1

typedef enum OsStatus {
  OS_STATUS_OK = 0,
  OS_STATUS_NULL_POINTER = 1,
  OS_STATUS_INVALID_ARGUMENT = 2,
  OS_STATUS_DEGENERATE = 3,
  OS_STATUS_CAP_EXCEEDED = 4,
  OS_STATUS_SOLVER_ABORT = 5,
  OS_STATUS_BUFFER_TOO_SMALL = 6,
  OS_STATUS_INTERNAL = 7,
} OsStatus;

/**
 * Scaling problem handle.
 */
typedef struct OsProblem OsProblem;

/**
 * PBE run handle.
 */
typedef struct OsReport OsReport;

/**
 * Scaling solution handle.
 */
typedef struct OsSolution OsSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error of this thread into `buf` (NUL-terminated, truncated
 * to fit) and returns the full message length without the terminator.
 *
 * # Safety
 * `buf` must point to `len` writable bytes or be null with `len == 0`.
 */
size_t os_last_error_message(char *buf, size_t len);

/**
 * Builds a preset problem by name with default parameters.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum OsStatus os_problem_preset(const char *name, struct OsProblem **out);

/**
 * Builds a problem from `n_coefficients` constants, a row-major
 * `n_coefficients × n_factors` exponent matrix and optional targets.
 *
 * # Safety
 * Arrays must hold the stated number of elements; `targets` may be null.
 */
enum OsStatus os_problem_new(size_t n_factors,
                             size_t n_coefficients,
                             const double *kappa,
                             const double *exponents,
                             const double *targets,
                             struct OsProblem **out);

/**
 * # Safety
 * `p` must come from this library or be null.
 */
void os_problem_free(struct OsProblem *p);

/**
 * # Safety
 * `p` must be a live problem handle; `n_factors` and `n_coefficients` writable.
 */
enum OsStatus os_problem_size(const struct OsProblem *p, size_t *n_factors, size_t *n_coefficients);

/**
 * Least-squares factors.
 *
 * # Safety
 * `p` must be a live problem handle and `out` writable.
 */
enum OsStatus os_solve_euclidean(const struct OsProblem *p, struct OsSolution **out);

/**
 * Traditional scaling forcing the 0-based `subset` coefficients to one.
 *
 * # Safety
 * `subset` must hold `len` elements.
 */
enum OsStatus os_solve_subset(const struct OsProblem *p,
                              const size_t *subset,
                              size_t len,
                              struct OsSolution **out);

/**
 * Annealed minimum of the chosen cost, default schedule.
 *
 * # Safety
 * `p` must be a live problem handle and `out` writable.
 */
enum OsStatus os_anneal(const struct OsProblem *p,
                        uint32_t kind,
                        uint64_t max_evaluations,
                        uint64_t seed,
                        struct OsSolution **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void os_solution_free(struct OsSolution *s);

/**
 * Copies the factors into `buf`.
 *
 * # Safety
 * `buf` must hold `len` doubles.
 */
enum OsStatus os_solution_theta(const struct OsSolution *s, double *buf, size_t len);

/**
 * Copies the coefficients into `buf`.
 *
 * # Safety
 * `buf` must hold `len` doubles.
 */
enum OsStatus os_solution_lambdas(const struct OsSolution *s, double *buf, size_t len);

/**
 * Cost and max/min coefficient ratio.
 *
 * # Safety
 * `cost` and `ratio` must be writable.
 */
enum OsStatus os_solution_metrics(const struct OsSolution *s, double *cost, double *ratio);

/**
 * Runs the latex population balance on the default window.
 *
 * # Safety
 * `out` must be writable.
 */
enum OsStatus os_pbe_latex(uint32_t theta, size_t n, size_t steps, struct OsReport **out);

/**
 * # Safety
 * `r` must come from this library or be null.
 */
void os_report_free(struct OsReport *r);

/**
 * `[min m, max m, min w, max w, max ε_m, max ε_w]`; errors are NaN when undefined.
 *
 * # Safety
 * `buf` must hold `len` doubles.
 */
enum OsStatus os_report_summary(const struct OsReport *r, double *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPTSCALE_H */
