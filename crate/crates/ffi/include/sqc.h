/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef SQC_H
#define SQC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqcStatus {
  SQC_STATUS_OK = 0,
  SQC_STATUS_NULL_ARGUMENT = 1,
  SQC_STATUS_INVALID_UTF8 = 2,
  SQC_STATUS_PARSE_ERROR = 3,
  SQC_STATUS_INVALID_JSON = 4,
  /**
   * The prover gave up or the model search was refused.
   */
  SQC_STATUS_SEARCH_FAILED = 5,
  SQC_STATUS_INVALID_LIMITS = 6,
  /**
   * A bug inside the library; the call had no effect.
   */
  SQC_STATUS_INTERNAL = 99,
} SqcStatus;

/**
 * Outcome of checking a whole script; numerically equal to the CLI exit code.
 */
typedef enum SqcVerdict {
  SQC_VERDICT_COMPLETE = 0,
  SQC_VERDICT_INCOMPLETE = 1,
  SQC_VERDICT_INVALID = 2,
  SQC_VERDICT_PARSE_ERROR = 3,
} SqcVerdict;

/**
 * A parsed, closed or open, first-order formula.
 */
typedef struct SqcFormula SqcFormula;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * is valid until the next call into the library on this thread.
 */
const char *sqc_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void sqc_string_free(char *s);

/**
 * Parses a formula. On success `*out` receives a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SqcStatus sqc_formula_parse(const char *text, struct SqcFormula **out);

/**
 * # Safety
 * `f` must be NULL or a handle from [`sqc_formula_parse`] not yet freed.
 */
void sqc_formula_free(struct SqcFormula *f);

/**
 * Canonical printing of a formula.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum SqcStatus sqc_formula_print(const struct SqcFormula *f, char **out);

/**
 * Searches interpretations with domains up to `max_domain`. Sets `*found`
 * to 1 and `*model` to a printed countermodel, or `*found` to 0 and
 * `*model` to NULL when none exists within the bound.
 *
 * # Safety
 * `f` must be a live handle; `found` and `model` must be writable.
 */
enum SqcStatus sqc_formula_countermodel(const struct SqcFormula *f,
                                        size_t max_domain,
                                        int32_t *found,
                                        char **model);

/**
 * Runs the bounded prover; on success `*script` receives the proof script.
 *
 * # Safety
 * `f` must be a live handle; `script` must be writable.
 */
enum SqcStatus sqc_formula_prove(const struct SqcFormula *f,
                                 size_t gamma_depth,
                                 size_t max_steps,
                                 char **script);

/**
 * Checks a whole script, reporting the verdict and number of valid steps.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `verdict` and `steps_validated`
 * must be writable.
 */
enum SqcStatus sqc_script_check(const char *text,
                                enum SqcVerdict *verdict,
                                size_t *steps_validated);

/**
 * The check service without HTTP: `request` is a CheckRequest JSON object,
 * `*response` receives the CheckResponse JSON.
 *
 * # Safety
 * `request` must be a NUL-terminated string; `response` must be writable.
 */
enum SqcStatus sqc_check_json(const char *request, char **response);

/**
 * Like [`sqc_check_json`] for `{"formula": ...}` parse requests.
 *
 * # Safety
 * `request` must be a NUL-terminated string; `response` must be writable.
 */
enum SqcStatus sqc_parse_json(const char *request, char **response);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQC_H */
