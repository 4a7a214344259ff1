/* Generated by build.rs; do not edit. */

#ifndef SQRTOP_H
#define SQRTOP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqrtopStatus {
  SQRTOP_STATUS_OK = 0,
  SQRTOP_STATUS_DOMAIN = 1,
  SQRTOP_STATUS_SINGULARITY = 2,
  SQRTOP_STATUS_NUMERICAL = 3,
  SQRTOP_STATUS_ACCURACY = 4,
  SQRTOP_STATUS_USAGE = 5,
  SQRTOP_STATUS_BRANCH = 6,
  SQRTOP_STATUS_UNSUPPORTED = 7,
  SQRTOP_STATUS_MALFORMED = 8,
  SQRTOP_STATUS_IO = 9,
  SQRTOP_STATUS_NULL_POINTER = 10,
  SQRTOP_STATUS_PANIC = 11,
} SqrtopStatus;

typedef enum SqrtopRegion {
  SQRTOP_REGION_PAST_TIMELIKE = -1,
  SQRTOP_REGION_SPACELIKE = 0,
  SQRTOP_REGION_FUTURE_TIMELIKE = 1,
} SqrtopRegion;

typedef enum SqrtopGridKind {
  SQRTOP_GRID_KIND_RADIAL = 0,
  SQRTOP_GRID_KIND_PERIODIC = 1,
  SQRTOP_GRID_KIND_OPEN = 2,
} SqrtopGridKind;

typedef enum SqrtopMassModel {
  SQRTOP_MASS_MODEL_SCALAR = 0,
  SQRTOP_MASS_MODEL_VERBATIM = 1,
  SQRTOP_MASS_MODEL_HERMITIAN = 2,
} SqrtopMassModel;

// Sampled complex field with 1 or 4 components per grid point.
typedef struct SqrtopField SqrtopField;

// Physical constants m, c, ħ, e.
typedef struct SqrtopParams SqrtopParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated to
// `len`) and returns the full message length excluding the NUL; 0 when there is no error.
// `buf` may be null to query the length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t sqrtop_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *sqrtop_version(void);

// Natural units m = c = ħ = e = 1. Never fails.
struct SqrtopParams *sqrtop_params_natural(void);

// # Safety
// `out` must be a valid pointer; the handle written there is released with
// `sqrtop_params_free`.
enum SqrtopStatus sqrtop_params_new(double m,
                                    double c,
                                    double hbar,
                                    double e,
                                    struct SqrtopParams **out_params);

// Inverse Compton length mc/ħ; NaN for a null handle.
//
// # Safety
// `params` must be null or a live handle.
double sqrtop_params_mu(const struct SqrtopParams *params);

// # Safety
// `params` must be null or a handle not yet freed.
void sqrtop_params_free(struct SqrtopParams *params);

// Modified Bessel function K_order(u), order 0..=3, u > 0.
//
// # Safety
// `value` must be a valid pointer.
enum SqrtopStatus sqrtop_bessel_k(uint32_t order, double u, double *value);

// Jump density μ²K₂(μr)/(2π²r²) of the free operator (per unit ħc); μ = 0 gives the massless
// limit 1/(π²r⁴).
//
// # Safety
// `value` must be a valid pointer.
enum SqrtopStatus sqrtop_levy_density(double mu,
                                      double r,
                                      double *value);

// Propagator kernel at (ct, r) off the light cone, with its region.
//
// # Safety
// `re`, `im` and `region` must be valid pointers.
enum SqrtopStatus sqrtop_z_kernel(double ct,
                                  double r,
                                  double mu,
                                  double *re,
                                  double *im,
                                  enum SqrtopRegion *region);

// Kernel of exp(−t√(−Δ + μ²)) at distance r.
//
// # Safety
// `params` must be a live handle and `value` a valid pointer.
enum SqrtopStatus sqrtop_heat_kernel(const struct SqrtopParams *params,
                                     double r,
                                     double t,
                                     double *value);

// Zero field on a radial grid of `n` samples or a cubic periodic/open grid of `n` points per
// side.
//
// # Safety
// `out_field` must be a valid pointer.
enum SqrtopStatus sqrtop_field_new(enum SqrtopGridKind kind,
                                   size_t n,
                                   double spacing,
                                   size_t components,
                                   struct SqrtopField **out_field);

// Parse the text field format.
//
// # Safety
// `text` must be a NUL-terminated string and `out_field` a valid pointer.
enum SqrtopStatus sqrtop_field_from_text(const char *text, struct SqrtopField **out_field);

// Serialise to the text field format. Release the string with `sqrtop_string_free`.
//
// # Safety
// `field` must be a live handle and `out_text` a valid pointer.
enum SqrtopStatus sqrtop_field_to_text(const struct SqrtopField *field, char **out_text);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void sqrtop_string_free(char *s);

// Number of complex samples (grid points × components); 0 for a null handle.
//
// # Safety
// `field` must be null or a live handle.
size_t sqrtop_field_len(const struct SqrtopField *field);

// Position of grid point `index` (without the component stride); on radial grids (r, 0, 0).
//
// # Safety
// `field` must be a live handle and `xyz` point to 3 writable doubles.
enum SqrtopStatus sqrtop_field_position(const struct SqrtopField *field, size_t index, double *xyz);

// Copy samples out as separate real and imaginary arrays of length `len`, which must equal
// `sqrtop_field_len`. Samples are point-major: index = point·components + component.
//
// # Safety
// `field` must be a live handle; `re` and `im` must each hold `len` doubles.
enum SqrtopStatus sqrtop_field_get(const struct SqrtopField *field,
                                   double *re,
                                   double *im,
                                   size_t len);

// Overwrite samples from real and imaginary arrays; layout as in `sqrtop_field_get`.
//
// # Safety
// `field` must be a live handle; `re` and `im` must each hold `len` doubles.
enum SqrtopStatus sqrtop_field_set(struct SqrtopField *field,
                                   const double *re,
                                   const double *im,
                                   size_t len);

// # Safety
// `field` must be null or a handle not yet freed.
void sqrtop_field_free(struct SqrtopField *field);

// Free square-root operator through its Bessel-kernel representation.
//
// # Safety
// Handles must be live and `out_field` a valid pointer; the result is a new handle.
enum SqrtopStatus sqrtop_apply_free(const struct SqrtopParams *params,
                                    const struct SqrtopField *field,
                                    struct SqrtopField **out_field);

// Free operator as a Fourier multiplier: periodic grids use the FFT, radial grids the sine
// transform.
//
// # Safety
// As for `sqrtop_apply_free`.
enum SqrtopStatus sqrtop_apply_spectral(const struct SqrtopParams *params,
                                        const struct SqrtopField *field,
                                        struct SqrtopField **out_field);

// Operator with constant vector potential `a` (3 doubles).
//
// # Safety
// As for `sqrtop_apply_free`; `a` must point to 3 doubles.
enum SqrtopStatus sqrtop_apply_constant_a(const struct SqrtopParams *params,
                                          const struct SqrtopField *field,
                                          const double *a,
                                          struct SqrtopField **out_field);

// Operator with constant magnetic field `b` (3 doubles) on an open grid.
//
// # Safety
// As for `sqrtop_apply_free`; `b` must point to 3 doubles.
enum SqrtopStatus sqrtop_apply_constant_b(const struct SqrtopParams *params,
                                          const struct SqrtopField *field,
                                          const double *b,
                                          enum SqrtopMassModel model,
                                          struct SqrtopField **out_field);

// exp(−i t √(...)/ħ) applied spectrally on a periodic grid.
//
// # Safety
// As for `sqrtop_apply_free`.
enum SqrtopStatus sqrtop_evolve_spectral(const struct SqrtopParams *params,
                                         const struct SqrtopField *field,
                                         double t,
                                         struct SqrtopField **out_field);

// Time evolution through the position-space propagator kernel, with vector potential `a`
// (3 doubles, or null for zero).
//
// # Safety
// As for `sqrtop_apply_free`; `a` must be null or point to 3 doubles.
enum SqrtopStatus sqrtop_propagate(const struct SqrtopParams *params,
                                   const struct SqrtopField *field,
                                   double t,
                                   const double *a,
                                   struct SqrtopField **out_field);

// Relative L² distance between two fields on the same grid.
//
// # Safety
// Handles must be live and `value` a valid pointer.
enum SqrtopStatus sqrtop_field_rel_error(const struct SqrtopField *field,
                                         const struct SqrtopField *reference,
                                         double *value);

// Run a verification suite (or "all") under default tolerances and write the number of failed
// checks to `failed`.
//
// # Safety
// `name` must be a NUL-terminated string and `failed` a valid pointer.
enum SqrtopStatus sqrtop_run_suite(const char *name, size_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQRTOP_H */
