#ifndef NFHEAT_H
#define NFHEAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum NfhStatus {
  NFH_STATUS_OK = 0,
  NFH_STATUS_NULL_POINTER = 1,
  NFH_STATUS_INVALID_STRING = 2,
  NFH_STATUS_DOMAIN = 3,
  NFH_STATUS_OUT_OF_RANGE = 4,
  NFH_STATUS_QUADRATURE = 5,
  NFH_STATUS_FIT = 6,
  NFH_STATUS_NUMERICAL = 7,
  NFH_STATUS_CONFIG = 8,
  NFH_STATUS_PARSE = 9,
  NFH_STATUS_IO = 10,
  NFH_STATUS_PANIC = 11,
} NfhStatus;

/**
 * Opaque permittivity model.
 */
typedef struct NfhMaterial NfhMaterial;

/**
 * Opaque pair of bodies facing each other across the gap.
 */
typedef struct NfhPlatePair NfhPlatePair;

/**
 * Plate transfer split by channel.
 */
typedef struct NfhChannels {
  double prop_e;
  double prop_m;
  double evan_e;
  double evan_m;
  double total;
} NfhChannels;

/**
 * Nonretarded amplitude at one frequency.
 */
typedef struct NfhLambda {
  double value;
  double plateau_estimate_error;
  double plateau_spread;
  double quasi_static;
  /**
   * Nonzero when the probe ladder spread exceeded 1%.
   */
  int32_t wide_spread;
} NfhLambda;

/**
 * Expansion coefficients. `d0` is NaN when unknown; functions that need it
 * then fail with `NFH_STATUS_DOMAIN`.
 */
typedef struct NfhCoefficients {
  double lambda;
  double beta;
  double d0;
} NfhCoefficients;

/**
 * Result of a `β` fit. `gamma` and `stderr_gamma` are NaN when not fitted.
 */
typedef struct NfhFit {
  double beta;
  double gamma;
  double residual_rms;
  double stderr_beta;
  double stderr_gamma;
  size_t n_points;
  size_t n_warnings;
} NfhFit;

/**
 * Thermally aggregated coefficients.
 */
typedef struct NfhAggregate {
  double lambda;
  double beta;
  double tail_mass;
} NfhAggregate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated
 * to `len`) into `buf`. Returns the full message length excluding the NUL,
 * or 0 if there is none. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t nfh_last_error_message(char *buf, size_t len);

/**
 * Bundled material preset by name (`"sic"`, `"sio2"`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum NfhStatus nfh_material_preset(const char *name, struct NfhMaterial **out);

/**
 * Single Lorentz oscillator; frequencies in rad/s.
 *
 * # Safety
 * `out` must be writable.
 */
enum NfhStatus nfh_material_lorentz(double eps_inf,
                                    double omega_l,
                                    double omega_t,
                                    double gamma,
                                    struct NfhMaterial **out);

/**
 * Frequency-independent permittivity.
 *
 * # Safety
 * `out` must be writable.
 */
enum NfhStatus nfh_material_constant(double eps_re, double eps_im, struct NfhMaterial **out);

/**
 * Tabulated optical data loaded from a whitespace-separated file of
 * `omega_rad_per_s eps_re eps_im` rows.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum NfhStatus nfh_material_table_file(const char *path, struct NfhMaterial **out);

/**
 * Releases a material. Null is ignored.
 *
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void nfh_material_free(struct NfhMaterial *m);

/**
 * ε(ω) at `omega` rad/s.
 *
 * # Safety
 * `m` must be a live handle; `re` and `im` must be writable.
 */
enum NfhStatus nfh_permittivity(const struct NfhMaterial *m, double omega, double *re, double *im);

/**
 * Pair of bodies. The materials are copied; the caller keeps ownership.
 *
 * # Safety
 * `first` and `second` must be live handles; `out` must be writable.
 */
enum NfhStatus nfh_plate_pair_new(const struct NfhMaterial *first,
                                  const struct NfhMaterial *second,
                                  struct NfhPlatePair **out);

/**
 * Two black bodies: unit transmission of propagating modes, no tunnelling.
 *
 * # Safety
 * `out` must be writable.
 */
enum NfhStatus nfh_plate_pair_unit_transmission(struct NfhPlatePair **out);

/**
 * Releases a plate pair. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void nfh_plate_pair_free(struct NfhPlatePair *p);

/**
 * Spectral plate transfer per unit area at `omega` rad/s and gap `s` m,
 * W·m⁻²·(rad/s)⁻¹ per unit occupation difference.
 *
 * # Safety
 * `pair` must be a live handle; `result` must be writable.
 */
enum NfhStatus nfh_spectral_transfer(const struct NfhPlatePair *pair,
                                     double omega,
                                     double s,
                                     double rel_tol,
                                     struct NfhChannels *result);

/**
 * Frequency-integrated plate flux per unit area, W·m⁻².
 *
 * # Safety
 * `pair` must be a live handle; `result` must be writable.
 */
enum NfhStatus nfh_integrate_plate(const struct NfhPlatePair *pair,
                                   double t1,
                                   double t2,
                                   double s,
                                   double rel_tol,
                                   struct NfhChannels *result);

/**
 * Nonretarded amplitude `λ_ω` at `omega` rad/s using the default probe
 * ladder.
 *
 * # Safety
 * `pair` must be a live handle; `result` must be writable.
 */
enum NfhStatus nfh_lambda_omega(const struct NfhPlatePair *pair,
                                double omega,
                                double rel_tol,
                                struct NfhLambda *result);

/**
 * Sphere–plate `h(d)`; needs `d0`.
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_sphere_plate_h(double d,
                                  double r,
                                  const struct NfhCoefficients *coeffs,
                                  double *result);

/**
 * Sphere–plate `dh/dd` (negative for a positive amplitude).
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_sphere_plate_h_prime(double d,
                                        double r,
                                        const struct NfhCoefficients *coeffs,
                                        double *result);

/**
 * Sphere–plate total transfer; needs `d0`.
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_sphere_plate_total(double d,
                                      double r,
                                      const struct NfhCoefficients *coeffs,
                                      double *result);

/**
 * Cylinder–plate transfer per unit length; needs `d0`.
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_cylinder_plate_total_per_length(double d,
                                                   double r,
                                                   const struct NfhCoefficients *coeffs,
                                                   double *result);

/**
 * Two-sphere total transfer; needs `d0`.
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_two_spheres_total(double d,
                                     double r1,
                                     double r2,
                                     const struct NfhCoefficients *coeffs,
                                     double *result);

/**
 * Sphere–plate near-field adjusted transfer `H(d) − H(d_ref)`; independent
 * of `d0`.
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_near_field_adjusted(double d,
                                       double d_ref,
                                       double r,
                                       const struct NfhCoefficients *coeffs,
                                       double *result);

/**
 * Difference of the adjusted proximity-approximation curve from the adjusted
 * curve, `4πβλ ln(d/d_ref)`.
 *
 * # Safety
 * `coeffs` must point to a valid struct; `result` must be writable.
 */
enum NfhStatus nfh_pta_deviation(double d,
                                 double d_ref,
                                 const struct NfhCoefficients *coeffs,
                                 double *result);

/**
 * Fits `β` (and `γ` if `include_gamma` is nonzero) to `n` sphere–plate
 * derivative samples `(d[i], h_prime[i])`.
 *
 * # Safety
 * `d` and `h_prime` must point to `n` readable values; `result` must be
 * writable.
 */
enum NfhStatus nfh_fit_beta(const double *d,
                            const double *h_prime,
                            size_t n,
                            double r,
                            double lambda_w,
                            int32_t include_gamma,
                            struct NfhFit *result);

/**
 * Thermally aggregates tabulated `λ_ω` and `β_ω` sampled at the increasing
 * frequencies `omega[0..n]` (rad/s).
 *
 * # Safety
 * `omega`, `lambda_w` and `beta_w` must point to `n` readable values;
 * `result` must be writable.
 */
enum NfhStatus nfh_aggregate(const double *omega,
                             const double *lambda_w,
                             const double *beta_w,
                             size_t n,
                             double t1,
                             double t2,
                             double rel_tol,
                             struct NfhAggregate *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NFHEAT_H */
