#ifndef SIEGEL_THETA_H
#define SIEGEL_THETA_H

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum StStatus {
  ST_STATUS_OK = 0,
  ST_STATUS_INVALID_INPUT = 1,
  ST_STATUS_CHECK_FAILED = 2,
  ST_STATUS_RESOURCE_CAP = 3,
  ST_STATUS_NULL_POINTER = 4,
  ST_STATUS_PANIC = 5,
} StStatus;

// Integral symmetric matrix `A` with nonzero determinant.
typedef struct StForm StForm;

// Theta series data together with its default evaluation point.
typedef struct StSpec StSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last call on this thread; empty after a successful call.
//
// The pointer stays valid until the next call into this library on the same thread.
const char *st_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a pointer obtained from this library and not yet freed.
void st_string_free(char *s);

// Looks up a named form such as `"e8"`, `"h2"` or `"diag:2,-2"`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum StStatus st_form_from_name(const char *name, struct StForm **out);

// Parses a form from JSON: a matrix, a name, or `{"A": ..}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum StStatus st_form_from_json(const char *json, struct StForm **out);

// # Safety
// `form` must be null or a handle from this library and not yet freed.
void st_form_free(struct StForm *form);

// Size of the matrix `A`.
//
// # Safety
// `form` must be a live handle and `dim` a valid pointer.
enum StStatus st_form_dim(const struct StForm *form, size_t *dim);

// Numbers of positive and negative eigenvalues of `A`.
//
// # Safety
// `form` must be a live handle; `r` and `s` valid pointers.
enum StStatus st_form_signature(const struct StForm *form, size_t *r, size_t *s);

// Splitting `A = A⁺ + A⁻` and majorant as a JSON document.
//
// # Safety
// `form` must be a live handle and `out` a valid pointer.
enum StStatus st_form_decompose_json(const struct StForm *form, char **out);

// Coset representatives of `A⁻¹ℤ^{m×n} / ℤ^{m×n}` as a JSON document.
//
// # Safety
// `form` must be a live handle and `out` a valid pointer.
enum StStatus st_cosets_json(const struct StForm *form, size_t genus, char **out);

// Basis of the homogeneous polynomials of degree `alpha` in an `m×n` matrix.
//
// # Safety
// `out` must be a valid pointer.
enum StStatus st_basis_json(size_t m, size_t n, uint32_t alpha, char **out);

// Builds a theta series from the same JSON document `siegel-theta eval` reads.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum StStatus st_spec_from_json(const char *json, struct StSpec **out);

// # Safety
// `spec` must be null or a handle from this library and not yet freed.
void st_spec_free(struct StSpec *spec);

// Evaluates the series at the point stored in the handle.
//
// A nonpositive `eps` selects the tolerance from the JSON document, or `1e-10`.
// `tail_bound` may be null.
//
// # Safety
// `spec` must be a live handle; `re` and `im` valid pointers.
enum StStatus st_theta_eval(const struct StSpec *spec,
                            double eps,
                            double *re,
                            double *im,
                            double *tail_bound);

// Evaluates the series at `Z = X + iY`, both given row-major as `n×n` arrays.
//
// # Safety
// `spec` must be a live handle; `x` and `y` must point to `n*n` doubles;
// `re` and `im` valid pointers.
enum StStatus st_theta_eval_at(const struct StSpec *spec,
                               size_t n,
                               const double *x,
                               const double *y,
                               double eps,
                               double *re,
                               double *im,
                               double *tail_bound);

// Runs a verification suite and writes its reports as a JSON array.
//
// `form` may be null for the built-in forms and `genus` zero for the default
// genera. Returns `CheckFailed` when any report fails; the array is still
// written.
//
// # Safety
// `suite` must be a NUL-terminated string, `form` null or a live handle,
// and `out` a valid pointer.
enum StStatus st_verify_suite_json(const char *suite,
                                   const struct StForm *form,
                                   size_t genus,
                                   uint64_t seed,
                                   char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIEGEL_THETA_H */
