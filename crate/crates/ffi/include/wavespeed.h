#ifndef WAVESPEED_H
#define WAVESPEED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsBoxForm {
  // Chosen from alpha: spatial when alpha >= 1.
  WS_BOX_FORM_AUTO = 0,
  WS_BOX_FORM_SPATIAL = 1,
  WS_BOX_FORM_TEMPORAL = 2,
} WsBoxForm;

typedef enum WsDesignKind {
  WS_DESIGN_KIND_SPATIAL = 0,
  WS_DESIGN_KIND_TEMPORAL = 1,
  WS_DESIGN_KIND_SPACETIME = 2,
} WsDesignKind;

typedef enum WsKind {
  WS_KIND_SP = 0,
  WS_KIND_TE = 1,
  WS_KIND_BOX_SP = 2,
  WS_KIND_BOX_TE = 3,
} WsKind;

typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_INVALID_ARGUMENT = 1,
  WS_STATUS_NUMERICAL = 2,
  WS_STATUS_SIZE_CAP = 3,
  WS_STATUS_NOT_PSD = 4,
  WS_STATUS_NULL_POINTER = 5,
  WS_STATUS_BUFFER_TOO_SMALL = 6,
  WS_STATUS_PANIC = 7,
} WsStatus;

// Assembled dense covariance of an increment vector.
typedef struct WsCovariance WsCovariance;

// Cholesky factor ready for sampling.
typedef struct WsSampler WsSampler;

typedef struct WsConstants {
  double c_sp_e;
  double c_sp_v;
  double c_te_e;
  double c_te_v;
  double c_box_sp_e;
  double c_box_sp_v;
  double c_box_te_e;
  double c_box_te_v;
  double error_estimate;
} WsConstants;

typedef struct WsParams {
  double vartheta;
  double beta;
  uint32_t d;
} WsParams;

// Fields not used by `kind` are ignored.
typedef struct WsDesign {
  enum WsDesignKind kind;
  double t;
  double lambda;
  double delta;
  size_t n;
  size_t m;
} WsDesign;

typedef struct WsEstimate {
  double raw;
  double rescaled;
  double estimate;
  double lower;
  double upper;
  double std_error;
} WsEstimate;

typedef struct WsMle {
  double estimate;
  double q_direct;
  double q_weighted;
  double boundary_term;
} WsMle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread, NUL-terminated, into `buf`
// (truncating to `len - 1` bytes). Returns the full message length in bytes.
size_t ws_last_error_message(char *buf, size_t len);

// Asymptotic constants for noise exponent `beta` in dimension `d`.
enum WsStatus ws_constants(double beta, uint32_t d, size_t series_cap, struct WsConstants *out);

// Assembles the covariance of the increment vector of `design`.
enum WsStatus ws_cov_new(const struct WsParams *params,
                         const struct WsDesign *design,
                         enum WsBoxForm form,
                         struct WsCovariance **out);

// Dimension of the covariance, 0 for a null handle.
size_t ws_cov_dim(const struct WsCovariance *cov);

// Copies the row-major matrix into `buf`, which must hold `dim * dim` values.
enum WsStatus ws_cov_copy(const struct WsCovariance *cov, double *buf, size_t len);

void ws_cov_free(struct WsCovariance *cov);

// Factorizes `cov` for sampling; `cov` may be freed afterwards.
enum WsStatus ws_sampler_new(const struct WsCovariance *cov, struct WsSampler **out);

// Diagonal jitter that was needed to factorize, or NaN for a null handle.
double ws_sampler_jitter(const struct WsSampler *sampler);

// Writes replicate `replicate` of `seed` (length `dim`) into `buf`.
enum WsStatus ws_sampler_draw(const struct WsSampler *sampler,
                              uint64_t seed,
                              uint64_t replicate,
                              double *buf,
                              size_t len);

void ws_sampler_free(struct WsSampler *sampler);

// Moment estimator of the wave speed with its `level` confidence interval.
enum WsStatus ws_estimate(enum WsKind kind,
                          const double *increments,
                          size_t len,
                          const struct WsParams *params,
                          const struct WsDesign *design,
                          double level,
                          struct WsEstimate *out);

// White-noise maximum likelihood estimator from `u(t_1), ..., u(t_len)`.
enum WsStatus ws_mle_whitenoise(const double *path, size_t len, double delta, struct WsMle *out);

// Squared Hellinger distance between the temporal observation laws under two wave speeds.
enum WsStatus ws_hellinger_sq(double theta0, double theta1, double beta, uint64_t m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVESPEED_H */
