/* C interface to the lmhs exact Hodge-theory verification library. */

#ifndef LMHS_H
#define LMHS_H

#pragma once

/* This file is generated by cbindgen from lmhs-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum LmhsStatus {
  /**
   * The operation succeeded and every mathematical check passed.
   */
  LMHS_STATUS_OK = 0,
  /**
   * The operation ran, but a mathematically meaningful check said no.
   */
  LMHS_STATUS_CHECK_FAILED = 1,
  /**
   * The input could not be parsed or violates a precondition.
   */
  LMHS_STATUS_INVALID_INPUT = 2,
  /**
   * A required pointer argument was null.
   */
  LMHS_STATUS_NULL_ARGUMENT = 3,
  /**
   * An internal panic was caught; this is a bug in the library.
   */
  LMHS_STATUS_PANIC = 4,
} LmhsStatus;

/**
 * Opaque handle to a parsed problem file.
 */
typedef struct LmhsProblem LmhsProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null when the
 * last call succeeded.  The pointer stays valid until the next lmhs call
 * on the same thread; do not free it.
 */
const char *lmhs_last_error(void);

/**
 * Library version as a static string; do not free.
 */
const char *lmhs_version(void);

/**
 * Parse a JSON problem document into an opaque handle.
 *
 * # Safety
 * `json` must be a valid NUL-terminated C string and `out` a valid
 * pointer; on success `*out` owns the handle.
 */
enum LmhsStatus lmhs_problem_parse(const char *json, struct LmhsProblem **out);

/**
 * Release a problem handle.  Null is a no-op.
 *
 * # Safety
 * `problem` must have been produced by [`lmhs_problem_parse`] and not yet
 * freed.
 */
void lmhs_problem_free(struct LmhsProblem *problem);

/**
 * Run one verification command against a parsed problem.  On `Ok` and
 * `CheckFailed` the deterministic JSON report is written to `report_out`
 * (caller frees it with [`lmhs_string_free`]); the two statuses mirror the
 * report's overall pass flag.
 *
 * # Safety
 * `problem` must be a live handle, `command` a NUL-terminated C string,
 * and `report_out` a valid pointer.
 */
enum LmhsStatus lmhs_run(const struct LmhsProblem *problem, const char *command, char **report_out);

/**
 * Canonical problem JSON for one of the built-in fixtures
 * ("a", "a_prime", "b", "c", "d"); caller frees the string.
 *
 * # Safety
 * `name` must be a NUL-terminated C string and `json_out` a valid pointer.
 */
enum LmhsStatus lmhs_fixture(const char *name, char **json_out);

/**
 * Release a string returned by this library.  Null is a no-op.
 *
 * # Safety
 * `s` must have been returned by an lmhs function and not yet freed.
 */
void lmhs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LMHS_H */
