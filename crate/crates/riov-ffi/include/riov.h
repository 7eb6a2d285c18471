#ifndef RIOV_H
#define RIOV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RiovStatus {
  RIOV_STATUS_OK = 0,
  RIOV_STATUS_NULL_POINTER = 1,
  RIOV_STATUS_INVALID_UTF8 = 2,
  RIOV_STATUS_IO = 3,
  RIOV_STATUS_PARSE = 4,
  RIOV_STATUS_INVALID_INSTANCE = 5,
  RIOV_STATUS_INFEASIBLE = 6,
  RIOV_STATUS_INDEX_OUT_OF_RANGE = 7,
  RIOV_STATUS_BAD_NUMBER = 8,
  RIOV_STATUS_PANIC = 9,
} RiovStatus;

/**
 * Validated problem instance.
 */
typedef struct RiovInstance RiovInstance;

/**
 * Result of [`riov_solve`], optimal or infeasible.
 */
typedef struct RiovSolution RiovSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates an instance from its text form.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RiovStatus riov_instance_parse(const char *text, struct RiovInstance **out);

/**
 * Reads an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RiovStatus riov_instance_load(const char *path, struct RiovInstance **out);

/**
 * # Safety
 * `inst` must come from this library and not be freed twice.
 */
void riov_instance_free(struct RiovInstance *inst);

/**
 * Number of variables, 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live instance handle.
 */
size_t riov_instance_num_vars(const struct RiovInstance *inst);

/**
 * Solves the inverse problem. `*out` receives a solution handle for both
 * optimal ([`RiovStatus::Ok`]) and infeasible ([`RiovStatus::Infeasible`])
 * outcomes.
 *
 * # Safety
 * `inst` must be a live instance handle and `out` a writable pointer.
 */
enum RiovStatus riov_solve(const struct RiovInstance *inst, struct RiovSolution **out);

/**
 * # Safety
 * `sol` must come from [`riov_solve`] and not be freed twice.
 */
void riov_solution_free(struct RiovSolution *sol);

/**
 * # Safety
 * `sol` must be NULL or a live solution handle.
 */
bool riov_solution_is_optimal(const struct RiovSolution *sol);

/**
 * Critical value `z*` as `"p/q"`, NULL when infeasible.
 *
 * # Safety
 * `sol` must be NULL or a live solution handle.
 */
char *riov_solution_z_star(const struct RiovSolution *sol);

/**
 * Weighted l1 distance `Σ d_j |c*_j − c_j|`, NULL when infeasible.
 *
 * # Safety
 * `sol` must be NULL or a live solution handle.
 */
char *riov_solution_objective(const struct RiovSolution *sol);

/**
 * Adjusted cost `c*_j`.
 *
 * # Safety
 * `sol` must be a live solution handle and `out` a writable pointer.
 */
enum RiovStatus riov_solution_c_star(const struct RiovSolution *sol, size_t j, char **out);

/**
 * Outcome label such as `"turning-midpoint"` or `"infeasible-left"`.
 *
 * # Safety
 * `sol` must be NULL or a live solution handle.
 */
char *riov_solution_case(const struct RiovSolution *sol);

/**
 * Full key/value report, as written by `riov solve`.
 *
 * # Safety
 * `sol` must be NULL or a live solution handle.
 */
char *riov_solution_report(const struct RiovSolution *sol);

/**
 * Main-loop iterations, 0 when infeasible.
 *
 * # Safety
 * `sol` must be NULL or a live solution handle.
 */
uint32_t riov_solution_iterations(const struct RiovSolution *sol);

/**
 * ψ(z) for `z` given as `"p/q"`. Returns [`RiovStatus::Infeasible`] with
 * `*out` NULL outside the feasible range.
 *
 * # Safety
 * `inst` must be a live instance handle, `z` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum RiovStatus riov_eval_psi(const struct RiovInstance *inst, const char *z, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void riov_string_free(char *s);

/**
 * Message for the last failed call on this thread, NULL if the last call
 * succeeded. Valid until the next call into the library on this thread.
 */
const char *riov_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIOV_H */
