#ifndef RDI_H
#define RDI_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum RdiStatus {
  RDI_STATUS_OK = 0,
  RDI_STATUS_NULL_POINTER = 1,
  RDI_STATUS_INVALID_UTF8 = 2,
  RDI_STATUS_USAGE = 3,
  RDI_STATUS_INVALID_PMF = 4,
  RDI_STATUS_CAPACITY = 5,
  RDI_STATUS_INFEASIBLE = 6,
  RDI_STATUS_PRECONDITION = 7,
  RDI_STATUS_IO = 8,
  RDI_STATUS_JSON = 9,
  RDI_STATUS_PANIC = 10,
} RdiStatus;

/**
 * Opaque joint distribution handle.
 */
typedef struct RdiJointPmf RdiJointPmf;

/**
 * One point of a region. `r_h` is NaN when the setting has no helper.
 */
typedef struct RdiPoint {
  double r_h;
  double r;
  double d;
  double delta;
} RdiPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a joint pmf from its JSON form and stores a new handle in `*out`.
 * Malformed JSON yields `Json`; a table that breaks the pmf invariants
 * yields `InvalidPmf`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer. The
 * handle must be released with [`rdi_pmf_free`].
 */
enum RdiStatus rdi_pmf_from_json(const char *json, struct RdiJointPmf **out);

/**
 * Releases a handle from [`rdi_pmf_from_json`]. NULL is ignored.
 *
 * # Safety
 * `pmf` must be NULL or a handle not yet freed.
 */
void rdi_pmf_free(struct RdiJointPmf *pmf);

/**
 * `H(over | given)` in bits. Names are comma-separated; `given` may be NULL.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum RdiStatus rdi_entropy(const struct RdiJointPmf *pmf_handle,
                           const char *over,
                           const char *given,
                           double *out);

/**
 * `I(a; b | given)` in bits. Names are comma-separated; `given` may be NULL.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum RdiStatus rdi_mutual_information(const struct RdiJointPmf *pmf_handle,
                                      const char *a,
                                      const char *b,
                                      const char *given,
                                      double *out);

/**
 * Binary entropy of `p` in bits.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RdiStatus rdi_binary_entropy(double p, double *out);

/**
 * Rate-distortion function of `x` with side information `si` at both ends.
 * `distortion_json` is e.g. `{"kind":"hamming"}`; `solver_json` may be NULL
 * for the default solver settings.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum RdiStatus rdi_rd_si_enc(const struct RdiJointPmf *pmf_handle,
                             const char *x,
                             const char *si,
                             const char *distortion_json,
                             const char *solver_json,
                             double d,
                             double *out);

/**
 * Closed-form region point for a binary erasure case such as
 * `"erased-y-hamming"`. `params_json` holds the case parameters; pass NaN
 * as `r_h` for cases without a helper.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum RdiStatus rdi_corollary_region(const char *case_name,
                                    const char *params_json,
                                    double d,
                                    double r_h,
                                    struct RdiPoint *out);

/**
 * Gaussian chain region point. `r_h` may be infinite. `saturated` may be NULL.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum RdiStatus rdi_gaussian_region(const char *params_json,
                                   double r_h,
                                   double d,
                                   struct RdiPoint *out,
                                   bool *saturated);

/**
 * Modular one-time pad on `[1 : modulus]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RdiStatus rdi_one_time_pad(uint64_t message, uint64_t key, uint64_t modulus, uint64_t *out);

/**
 * Copy of the last error message on this thread, or NULL if the last call
 * succeeded. Free with [`rdi_string_free`].
 */
char *rdi_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from [`rdi_last_error_message`] not yet freed.
 */
void rdi_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RDI_H */
