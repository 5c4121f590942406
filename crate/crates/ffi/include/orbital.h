#ifndef ORBITAL_H
#define ORBITAL_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrbitalStatus {
  ORBITAL_STATUS_OK = 0,
  ORBITAL_STATUS_NULL_POINTER = 1,
  ORBITAL_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input lies outside the sample space of the operation.
   */
  ORBITAL_STATUS_DOMAIN = 3,
  ORBITAL_STATUS_NUMERICAL = 4,
  ORBITAL_STATUS_PANIC = 5,
} OrbitalStatus;

typedef enum OrbitalMetric {
  ORBITAL_METRIC_KENDALL = 0,
  ORBITAL_METRIC_CAYLEY = 1,
  ORBITAL_METRIC_HAMMING = 2,
} OrbitalMetric;

typedef enum OrbitalGauge {
  ORBITAL_GAUGE_L2 = 0,
  /**
   * Uses `gauge_param` as `q`.
   */
  ORBITAL_GAUGE_LQ = 1,
  /**
   * Uses `gauge_matrix` as `A`.
   */
  ORBITAL_GAUGE_ELLIPSOID = 2,
  /**
   * Mean of the l2 and l4 norms.
   */
  ORBITAL_GAUGE_MIXED_L2L4 = 3,
} OrbitalGauge;

typedef enum OrbitalRadial {
  ORBITAL_RADIAL_GAUSSIAN = 0,
  ORBITAL_RADIAL_EXPONENTIAL = 1,
} OrbitalRadial;

/**
 * Opaque ranking model.
 */
typedef struct OrbitalRankingModel OrbitalRankingModel;

/**
 * Opaque star-shaped model.
 */
typedef struct OrbitalStarModel OrbitalStarModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message on this thread, excluding the
 * terminating nul; 0 when the last call succeeded.
 */
size_t orbital_last_error_length(void);

/**
 * Copies the last error message into `buf` (nul terminated, truncated to
 * `len - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t orbital_last_error_message(char *buf, size_t len);

/**
 * Nul-terminated library version; static storage.
 */
const char *orbital_version(void);

/**
 * Ranking model on `m` objects. `m_prime = 0` gives the Mallows family,
 * otherwise the hierarchical model of depth `m_prime`. `p_z` holds `m`
 * top-object probabilities.
 *
 * # Safety
 * `p_z` must be valid for `m` reads and `out` for one write.
 */
enum OrbitalStatus orbital_ranking_model_new(size_t m,
                                             size_t m_prime,
                                             enum OrbitalMetric metric,
                                             double theta,
                                             const double *p_z,
                                             struct OrbitalRankingModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`orbital_ranking_model_new`] not yet freed.
 */
void orbital_ranking_model_free(struct OrbitalRankingModel *model);

/**
 * Probability of the ranking `ranks` (`ranks[k]` is the rank of object `k + 1`).
 *
 * # Safety
 * `model` must be a live handle, `ranks` valid for `m` reads, `out` for one write.
 */
enum OrbitalStatus orbital_ranking_pmf(const struct OrbitalRankingModel *model,
                                       const size_t *ranks,
                                       size_t m,
                                       double *out);

/**
 * Writes `n` rankings drawn with `seed` into `out`, `m` ranks per row.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for `n * m` writes.
 */
enum OrbitalStatus orbital_ranking_sample(const struct OrbitalRankingModel *model,
                                          uint64_t seed,
                                          size_t n,
                                          size_t *out);

/**
 * `σ = h t s`: writes the images of `h` on ranks `m_prime+1..m`, of `t` on
 * ranks `2..m` and the top object of `σ`.
 *
 * # Safety
 * `ranks` must be valid for `m` reads, `out_h` for `m - m_prime` writes,
 * `out_t` for `m - 1` writes and `out_top` for one write.
 */
enum OrbitalStatus orbital_ranking_decompose(const size_t *ranks,
                                             size_t m,
                                             size_t m_prime,
                                             size_t *out_h,
                                             size_t *out_t,
                                             size_t *out_top);

/**
 * Star-shaped model in `R^p` with the default sign rule.
 *
 * # Safety
 * `gauge_matrix` must be valid for `p * p` reads when `gauge` is
 * `Ellipsoid` (it is ignored otherwise); `out` must be valid for one write.
 */
enum OrbitalStatus orbital_star_model_new(size_t p,
                                          enum OrbitalGauge gauge,
                                          double gauge_param,
                                          const double *gauge_matrix,
                                          enum OrbitalRadial radial,
                                          double c,
                                          struct OrbitalStarModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`orbital_star_model_new`] not yet freed.
 */
void orbital_star_model_free(struct OrbitalStarModel *model);

/**
 * `x = ε h z`.
 *
 * # Safety
 * `model` must be a live handle; `x` and `out_z` valid for `p` elements;
 * `out_eps` and `out_h` for one write.
 */
enum OrbitalStatus orbital_star_decompose(const struct OrbitalStarModel *model,
                                          const double *x,
                                          size_t p,
                                          double *out_eps,
                                          double *out_h,
                                          double *out_z);

/**
 * Unnormalized density `c(ε(x)) f(ρ(x))`.
 *
 * # Safety
 * `model` must be a live handle, `x` valid for `p` reads, `out` for one write.
 */
enum OrbitalStatus orbital_star_density(const struct OrbitalStarModel *model,
                                        const double *x,
                                        size_t p,
                                        double *out);

/**
 * Lebesgue mass of [`orbital_star_density`].
 *
 * # Safety
 * `model` must be a live handle and `out` valid for one write.
 */
enum OrbitalStatus orbital_star_normalizing_constant(const struct OrbitalStarModel *model,
                                                     double *out);

/**
 * Writes `n` points drawn with `seed`, `p` coordinates per row.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for `n * p` writes.
 */
enum OrbitalStatus orbital_star_sample(const struct OrbitalStarModel *model,
                                       uint64_t seed,
                                       size_t n,
                                       double *out);

/**
 * Draws one pair `W1 ~ W_p(n1, Σ)`, `W2 ~ W_p(n2, Σ)`. `sigma` may be null
 * for the identity.
 *
 * # Safety
 * `sigma` must be null or valid for `p * p` reads; `out_w1` and `out_w2`
 * valid for `p * p` writes.
 */
enum OrbitalStatus orbital_wishart_sample_pair(size_t p,
                                               double n1,
                                               double n2,
                                               const double *sigma,
                                               uint64_t seed,
                                               double *out_w1,
                                               double *out_w2);

/**
 * `(W1, W2) = (T C Λ Cᵀ Tᵀ, T C (I − Λ) Cᵀ Tᵀ)` with `C` in canonical sign
 * form and `λ` descending.
 *
 * # Safety
 * `w1`, `w2` must be valid for `p * p` reads; `out_t`, `out_c` for `p * p`
 * writes; `out_lambda` for `p` writes.
 */
enum OrbitalStatus orbital_wishart_decompose(size_t p,
                                             const double *w1,
                                             const double *w2,
                                             double *out_t,
                                             double *out_c,
                                             double *out_lambda);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBITAL_H */
