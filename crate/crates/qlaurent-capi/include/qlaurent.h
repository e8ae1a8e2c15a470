#ifndef QLAURENT_H
#define QLAURENT_H

/* Generated by cbindgen from qlaurent-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes for every fallible entry point.
typedef enum QlStatus {
  QL_STATUS_OK = 0,
  QL_STATUS_INVALID_ARGUMENT = 1,
  QL_STATUS_DEGENERATE_PARAMETERS = 2,
  QL_STATUS_POLE_IN_SERIES = 3,
  QL_STATUS_BALANCE_VIOLATION = 4,
  QL_STATUS_NON_TERMINATING = 5,
  QL_STATUS_INEXACT_DIVISION = 6,
  QL_STATUS_NEAR_SINGULAR_POINT = 7,
  QL_STATUS_NO_CONVERGENCE = 8,
  QL_STATUS_INSUFFICIENT_DECAY = 9,
  QL_STATUS_DEGENERATE_WEIGHT = 10,
  QL_STATUS_DOMAIN_VIOLATION = 11,
  // One or more suite assertions failed; the CSV report is still
  // returned.
  QL_STATUS_VERIFICATION_FAILED = 12,
} QlStatus;

// Opaque parameter handle: the tuple (q, t1..t4) at a working precision.
typedef struct QlParams QlParams;

// Opaque Laurent polynomial handle.
typedef struct QlPoly QlPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread, or NULL when the last
// call succeeded. The pointer stays valid until the next failing call on
// the same thread.
const char *ql_last_error_message(void);

// Create a parameter handle for 0 < q < 1 and |t_i| < 1 at
// `working_digits` decimal digits (minimum 30). On success writes the new
// handle to `out`.
//
// # Safety
// `t` must point to four readable doubles and `out` to a writable pointer
// slot.
enum QlStatus ql_params_new(double q,
                            const double *t,
                            uint32_t working_digits,
                            struct QlParams **out);

// Release a parameter handle. NULL is ignored.
//
// # Safety
// `handle` must be NULL or a pointer returned by [`ql_params_new`] that has
// not been freed yet.
void ql_params_free(struct QlParams *handle);

// The circle-weight normalization constant for this parameter set.
//
// # Safety
// `handle` must be a live parameter handle and `out` writable.
enum QlStatus ql_mu(const struct QlParams *handle, double *out);

// Build one member of a polynomial family. `family` is one of
// 'R','S','T','U','X','Y','P' (or 'Q' for the parameter-inverted partner of
// 'P'); negative indices are valid for the X/Y/P families.
//
// # Safety
// `handle` must be a live parameter handle and `out` a writable pointer
// slot.
enum QlStatus ql_poly_build(const struct QlParams *handle,
                            char family,
                            int64_t index,
                            struct QlPoly **out);

// Release a polynomial handle. NULL is ignored.
//
// # Safety
// `handle` must be NULL or a pointer returned by [`ql_poly_build`] that has
// not been freed yet.
void ql_poly_free(struct QlPoly *handle);

// Lowest stored exponent.
//
// # Safety
// `handle` must be a live polynomial handle.
int64_t ql_poly_min_exp(const struct QlPoly *handle);

// Number of stored coefficients (zero for the zero polynomial).
//
// # Safety
// `handle` must be a live polynomial handle.
size_t ql_poly_len(const struct QlPoly *handle);

// Coefficient on z^(min_exp + i), rounded to double precision.
//
// # Safety
// `handle` must be a live polynomial handle; `re` and `im` must be
// writable.
enum QlStatus ql_poly_coeff(const struct QlPoly *handle, size_t i, double *re, double *im);

// Full-precision JSON of the polynomial ({min_exp, digits, coeffs}).
// The returned string must be released with [`ql_string_free`].
//
// # Safety
// `handle` must be a live polynomial handle.
char *ql_poly_to_json(const struct QlPoly *handle);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be NULL or a pointer obtained from a qlaurent string-returning
// function that has not been freed yet.
void ql_string_free(char *s);

// Run one verification suite and return its CSV report through `csv_out`
// (release with [`ql_string_free`]). `suite` is one of the CLI suite names
// ("cher-orthogonality", "operators", "recurrences", "connections",
// "sears", "racah", "nonsymmetric", "aw-cross") or "selftest" for the
// scalar identity battery. Returns `Ok` when every assertion passed,
// `VerificationFailed` (with the report still written) otherwise.
//
// # Safety
// `handle` must be a live parameter handle, `suite` a NUL-terminated
// string, and `csv_out` writable (it may be NULL to discard the report).
enum QlStatus ql_verify_suite(const struct QlParams *handle,
                              const char *suite,
                              uint32_t max_n,
                              uint32_t racah_n,
                              uint32_t racah_pair,
                              char **csv_out);

// Number of suites reachable through [`ql_verify_suite`], excluding the
// battery.
int ql_suite_count(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLAURENT_H */
