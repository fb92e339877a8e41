#ifndef ROY_DETECT_H
#define ROY_DETECT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible call.
 */
typedef enum RdStatus {
  RD_STATUS_OK = 0,
  RD_STATUS_NULL_POINTER = 1,
  RD_STATUS_INVALID_ARGUMENT = 2,
  RD_STATUS_INVALID_DIMS = 3,
  RD_STATUS_DOMAIN = 4,
  RD_STATUS_NON_CONVERGENCE = 5,
  RD_STATUS_NUMERICAL_BREAKDOWN = 6,
  RD_STATUS_NOT_POSITIVE_DEFINITE = 7,
  RD_STATUS_BRACKET_FAILURE = 8,
  RD_STATUS_SUBCRITICAL = 9,
  RD_STATUS_CLOSED_FORM_UNAVAILABLE = 10,
  RD_STATUS_TABLE_FORMAT = 11,
  RD_STATUS_PANIC = 12,
} RdStatus;

/*
 Opaque detector handle.
 */
typedef struct RdDetector RdDetector;

/*
 Opaque Tracy–Widom table handle.
 */
typedef struct RdTw2Table RdTw2Table;

/*
 Edge parameters `r`, `μ`, `σ₀`, `γ̄_p`.
 */
typedef struct RdEdgeParams {
  double r;
  double mu;
  double sigma0;
  double gamma_p;
} RdEdgeParams;

/*
 Spike parameters; `nu` and `sigma1` are NaN when `supercritical` is 0.
 */
typedef struct RdSpikeParams {
  int32_t supercritical;
  double nu;
  double sigma1;
} RdSpikeParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL if it succeeded.
 The pointer stays valid until the next call into this library on the same thread.
 */
const char *rd_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *rd_version(void);

/*
 Central CDF `P(λ_max(S⁻¹R) ≤ t)`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_central_cdf(size_t m, size_t n, size_t p, double t, double *out);

/*
 Rank-one non-central CDF with non-centrality `theta > 0`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_noncentral_cdf(size_t m, size_t n, size_t p, double theta, double t, double *out);

/*
 Creates a detector for dimensions `(m, n, p)` and signal strength `gamma`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_detector_new(size_t m, size_t n, size_t p, double gamma, struct RdDetector **out);

/*
 Releases a detector created by [`rd_detector_new`].

 # Safety
 `det` must be NULL or a handle from [`rd_detector_new`] not yet freed.
 */
void rd_detector_free(struct RdDetector *det);

/*
 Threshold `ξ_th` achieving false-alarm rate `pf`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_detector_threshold(const struct RdDetector *det, double pf, double *out);

/*
 False-alarm probability at threshold `xi`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_detector_pfa(const struct RdDetector *det, double xi, double *out);

/*
 Detection probability at threshold `xi`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_detector_pd(const struct RdDetector *det, double xi, double *out);

/*
 ROC profile on a strictly increasing grid of `len` false-alarm rates.
 Fills `pd_out[k]` and, when non-NULL, `threshold_out[k]`.

 # Safety
 `pf_grid` and `pd_out` must hold `len` doubles; `threshold_out` likewise if non-NULL.
 */
enum RdStatus rd_detector_roc(const struct RdDetector *det,
                              const double *pf_grid,
                              size_t len,
                              double *pd_out,
                              double *threshold_out);

/*
 Closed-form `P_D(P_F)` for `n = m`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_roc_closed_form(size_t m, size_t p, double gamma, double pf, double *out);

/*
 Tracy–Widom centering and scaling for ratios `c1 = m/p`, `c2 = m/n`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_edge_params(double c1, double c2, struct RdEdgeParams *out);

/*
 Regime classification and spike parameters at signal strength `gamma_bar`.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_spike_params(double c1, double c2, double gamma_bar, struct RdSpikeParams *out);

/*
 Asymptotic power at `m` sensors and level `alpha`. `table` may be NULL
 for the bundled Tracy–Widom table.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_asymptotic_power(double c1,
                                  double c2,
                                  double gamma_bar,
                                  size_t m,
                                  double alpha,
                                  const struct RdTw2Table *table,
                                  double *out);

/*
 Loads a Tracy–Widom table from a two-column text file.

 # Safety
 `path` must be a valid NUL-terminated string.
 */
enum RdStatus rd_tw2_table_load(const char *path, struct RdTw2Table **out);

/*
 Releases a table from [`rd_tw2_table_load`].

 # Safety
 `table` must be NULL or a handle from [`rd_tw2_table_load`] not yet freed.
 */
void rd_tw2_table_free(struct RdTw2Table *table);

/*
 `F₂(s)`; `table` may be NULL for the bundled table.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_tw2_cdf(const struct RdTw2Table *table, double s, double *out);

/*
 `F₂⁻¹(q)` for `q ∈ (0, 1)`; `table` may be NULL for the bundled table.

 # Safety
 Each non-NULL pointer argument must be valid and aligned for its pointee.
 */
enum RdStatus rd_tw2_quantile(const struct RdTw2Table *table, double q, double *out);

/*
 Draws `trials` Monte Carlo samples of `λ_max` (or of `λ̂_max` when
 `rescaled` is non-zero) and writes them sorted ascending into `samples_out`.

 # Safety
 `samples_out` must hold `trials` doubles.
 */
enum RdStatus rd_simulate(size_t m,
                          size_t n,
                          size_t p,
                          double theta,
                          size_t trials,
                          uint64_t seed,
                          uint64_t stream,
                          int32_t rescaled,
                          double *samples_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROY_DETECT_H */
