#ifndef HPKAHLER_H
#define HPKAHLER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HpkStatus {
  HPK_STATUS_OK = 0,
  HPK_STATUS_NULL_POINTER = 1,
  HPK_STATUS_INVALID_ARGUMENT = 2,
  HPK_STATUS_POSITIVITY_VIOLATION = 3,
  HPK_STATUS_INVALID_PROFILE = 4,
  HPK_STATUS_NUMERICAL_FAILURE = 5,
  HPK_STATUS_OUT_OF_RANGE = 6,
  HPK_STATUS_PANIC = 7,
} HpkStatus;

/**
 * A solved profile `h` on `[-L/4, 5L/4]`.
 */
typedef struct HpkProfile HpkProfile;

/**
 * A verification report for one `(α, n)`.
 */
typedef struct HpkReport HpkReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *hpk_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hpk_version(void);

/**
 * Solves the profile ODE for the family member `P_α`.
 *
 * # Safety
 * `out` must be null or point to writable storage for one pointer.
 */
enum HpkStatus hpk_profile_solve_alpha(double alpha, struct HpkProfile **out);

/**
 * Solves the profile ODE for raw ascending coefficients.
 *
 * # Safety
 * `coeffs` must point to `len` readable doubles; `out` as above.
 */
enum HpkStatus hpk_profile_solve_coeffs(const double *coeffs, size_t len, struct HpkProfile **out);

/**
 * Writes `L` to `out`.
 *
 * # Safety
 * `p` must be a live handle; `out` writable.
 */
enum HpkStatus hpk_profile_length(const struct HpkProfile *p, double *out);

/**
 * Evaluates `h, h', f, φ` at `t ∈ [-L/4, 5L/4]`. Any output pointer may be
 * null to skip it.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be writable.
 */
enum HpkStatus hpk_profile_eval(const struct HpkProfile *p,
                                double t,
                                double *h,
                                double *hp,
                                double *f,
                                double *phi);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void hpk_profile_free(struct HpkProfile *p);

/**
 * Runs the full verification for `(α, n)` with default tolerances.
 *
 * # Safety
 * `out` must be null or point to writable storage for one pointer.
 */
enum HpkStatus hpk_verify(double alpha,
                          size_t n,
                          size_t samples_t,
                          size_t samples_base,
                          uint64_t seed,
                          struct HpkReport **out);

/**
 * Writes whether every check passed.
 *
 * # Safety
 * `r` must be a live handle; `out` writable.
 */
enum HpkStatus hpk_report_passed(const struct HpkReport *r, bool *out);

/**
 * Largest residual of the named check (for example `"hp"`).
 *
 * # Safety
 * `r` must be a live handle, `name` a NUL-terminated string, `out` writable.
 */
enum HpkStatus hpk_report_check_max(const struct HpkReport *r, const char *name, double *out);

/**
 * Serializes the report as JSON. Release the string with [`hpk_string_free`].
 *
 * # Safety
 * `r` must be a live handle; `out` writable.
 */
enum HpkStatus hpk_report_json(const struct HpkReport *r, char **out);

/**
 * # Safety
 * `r` must be null or a handle not yet freed.
 */
void hpk_report_free(struct HpkReport *r);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void hpk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HPKAHLER_H */
