#ifndef CURVECOMM_H
#define CURVECOMM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CurvecommDecoder {
  CURVECOMM_DECODER_MATCHED = 0,
  CURVECOMM_DECODER_EUCLIDEAN = 1,
} CurvecommDecoder;

// Result code of every fallible call.
typedef enum CurvecommStatus {
  CURVECOMM_STATUS_OK = 0,
  CURVECOMM_STATUS_NULL_POINTER = 1,
  CURVECOMM_STATUS_INVALID_PARAMETER = 2,
  CURVECOMM_STATUS_INVALID_PAIR = 3,
  CURVECOMM_STATUS_NOT_PHANTOM = 4,
  CURVECOMM_STATUS_NUMERIC_FAILURE = 5,
  CURVECOMM_STATUS_SINGULAR_MODEL = 6,
  CURVECOMM_STATUS_CONFIG = 7,
  CURVECOMM_STATUS_PANIC = 8,
} CurvecommStatus;

// Opaque constellation handle.
typedef struct CurvecommConstellation CurvecommConstellation;

typedef struct CurvecommPairGeometry {
  double delta;
  double cos_alpha;
  double gamma;
  double proj_i;
  double proj_j;
  bool phantom;
} CurvecommPairGeometry;

typedef struct CurvecommAntipodalGeometry {
  double delta;
  double gamma;
  double speed;
  double rho;
} CurvecommAntipodalGeometry;

// Euclidean SER bounds of a uniform even codebook and the matched antipodal
// lower bound.
typedef struct CurvecommSerBounds {
  double lower;
  double upper_raw;
  // `min(upper_raw, 1)`.
  double upper;
  double matched_lower;
} CurvecommSerBounds;

// Monte Carlo frequency with a 95% Wilson interval.
typedef struct CurvecommEstimate {
  double value;
  uint64_t errors;
  uint64_t trials;
  double ci_low;
  double ci_high;
  uint64_t seed;
} CurvecommEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// NUL-terminated message of the last failure on this thread, or an empty
// string. Valid until the next failing call on the same thread.
const char *curvecomm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *curvecomm_version(void);

// Gaussian upper tail `Q(x)`.
enum CurvecommStatus curvecomm_q_function(double x, double *out);

// Uniform codebook of `m` points on the order-`k` curve.
enum CurvecommStatus curvecomm_constellation_new_uniform(size_t k,
                                                         size_t m,
                                                         struct CurvecommConstellation **out);

// Codebook at `count` strictly increasing phases in `[0, 2π)`.
enum CurvecommStatus curvecomm_constellation_new_phases(size_t k,
                                                        const double *phases,
                                                        size_t count,
                                                        struct CurvecommConstellation **out);

// Releases a handle. Null is ignored.
void curvecomm_constellation_free(struct CurvecommConstellation *c);

enum CurvecommStatus curvecomm_constellation_len(const struct CurvecommConstellation *c,
                                                 size_t *out);

// Ambient dimension `2k`.
enum CurvecommStatus curvecomm_constellation_dim(const struct CurvecommConstellation *c,
                                                 size_t *out);

// Copies point `i` into `buf`, which must hold `dim` values.
enum CurvecommStatus curvecomm_constellation_point(const struct CurvecommConstellation *c,
                                                   size_t i,
                                                   double *buf,
                                                   size_t len);

enum CurvecommStatus curvecomm_pair_geometry(const struct CurvecommConstellation *c,
                                             size_t i,
                                             size_t j,
                                             double tol,
                                             struct CurvecommPairGeometry *out);

enum CurvecommStatus curvecomm_antipodal_geometry(size_t k, struct CurvecommAntipodalGeometry *out);

// Euclidean pairwise error from chord length and transmit-side alignment.
enum CurvecommStatus curvecomm_euclidean_pep(double delta,
                                             double cos_alpha,
                                             double beta,
                                             double sigma_c,
                                             double *out);

// Matched pairwise error of a pair the caller asserts is phantom.
enum CurvecommStatus curvecomm_matched_phantom_pep(double delta,
                                                   double gamma,
                                                   double beta,
                                                   double sigma_c,
                                                   size_t quad_order,
                                                   double *out);

// Matched pairwise error of a codebook pair; non-phantom pairs yield
// `CURVECOMM_STATUS_NOT_PHANTOM`.
enum CurvecommStatus curvecomm_matched_pep_for_pair(const struct CurvecommConstellation *c,
                                                    size_t i,
                                                    size_t j,
                                                    double beta,
                                                    double sigma_c,
                                                    size_t quad_order,
                                                    double tol,
                                                    double *out);

// Euclidean pairwise error at offset `q` of a uniform `m`-point codebook.
enum CurvecommStatus curvecomm_offset_pep(size_t k,
                                          size_t m,
                                          size_t q,
                                          double beta,
                                          double sigma_c,
                                          double *out);

enum CurvecommStatus curvecomm_ser_bounds(size_t k,
                                          size_t m,
                                          double beta,
                                          double sigma_c,
                                          size_t quad_order,
                                          struct CurvecommSerBounds *out);

// Monte Carlo frequency of "`j` scores no worse than `i`" with `i` sent.
// `workers = 0` uses the default pool size; the result does not depend on it.
enum CurvecommStatus curvecomm_estimate_pairwise_pep(const struct CurvecommConstellation *c,
                                                     size_t i,
                                                     size_t j,
                                                     uint32_t decoder_kind,
                                                     double beta,
                                                     double sigma_c,
                                                     uint64_t trials,
                                                     uint64_t seed,
                                                     size_t workers,
                                                     struct CurvecommEstimate *out);

// Monte Carlo symbol error rate with equiprobable symbols.
enum CurvecommStatus curvecomm_estimate_ser(const struct CurvecommConstellation *c,
                                            uint32_t decoder_kind,
                                            double beta,
                                            double sigma_c,
                                            uint64_t trials,
                                            uint64_t seed,
                                            size_t workers,
                                            struct CurvecommEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVECOMM_H */
