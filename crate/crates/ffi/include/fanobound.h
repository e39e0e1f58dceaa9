/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef FANOBOUND_H
#define FANOBOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every function.
typedef enum {
  FB_STATUS_OK = 0,
  FB_STATUS_NULL_POINTER = 1,
  FB_STATUS_INVALID_ARGUMENT = 2,
  FB_STATUS_DIMENSION_MISMATCH = 3,
  FB_STATUS_NUMERIC_FAILURE = 4,
  FB_STATUS_PANIC = 5,
} FbStatus;

// Inequality behind an `FbAdvantageBound`.
typedef enum {
  FB_METHOD_FANO = 0,
  FB_METHOD_GENERALIZED_FANO = 1,
  FB_METHOD_RERO = 2,
} FbMethod;

// Adversary used by the simulators.
typedef enum {
  // Bayes-optimal guess using the prior.
  FB_ADVERSARY_MAP = 0,
  // Maximum-likelihood guess that ignores the prior.
  FB_ADVERSARY_MAXIMUM_LIKELIHOOD = 1,
} FbAdversary;

// Opaque Gaussian mechanism: encodings, noise scale and prior.
typedef struct FbGaussian FbGaussian;

// Opaque prior over candidate indices.
typedef struct FbPrior FbPrior;

// Advantage upper bound. `alpha` is infinite when the baseline is attained in the limit.
typedef struct {
  double t_star;
  double success_upper;
  double p_star;
  double advantage;
  double alpha;
  double info_bound;
  uint64_t m;
  FbMethod method;
  bool vacuous;
} FbAdvantageBound;

// Outcome of a simulated attack campaign, with 95% Wilson intervals.
typedef struct {
  uint64_t n_trials;
  uint64_t successes;
  double empirical_success;
  double empirical_advantage;
  double success_ci_low;
  double success_ci_high;
  double advantage_ci_low;
  double advantage_ci_high;
  double p_star;
  uint64_t seed;
} FbTrialReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated
// to fit) and returns the full message length excluding the terminator. Returns 0 when
// there is no message.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t fb_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *fb_version(void);

// Creates a prior from `len` probabilities summing to 1.
//
// # Safety
// `probs` must point to `len` readable doubles; `out` must be writable.
FbStatus fb_prior_new(const double *probs, size_t len, FbPrior **out);

// Creates the uniform prior over `m` candidates. Very large `m` is stored symbolically.
//
// # Safety
// `out` must be writable.
FbStatus fb_prior_uniform(uint64_t m, FbPrior **out);

// Releases a prior. Null is ignored.
//
// # Safety
// `prior` must come from `fb_prior_new`/`fb_prior_uniform` and not be used afterwards.
void fb_prior_free(FbPrior *prior);

// Number of candidates.
//
// # Safety
// Pointers must be valid.
FbStatus fb_prior_size(const FbPrior *prior, uint64_t *out);

// Shannon entropy of the prior in nats.
//
// # Safety
// Pointers must be valid.
FbStatus fb_prior_entropy(const FbPrior *prior, double *out);

// Exact mutual information of randomized response with parameter `q`.
//
// # Safety
// Pointers must be valid.
FbStatus fb_rr_exact_mi(double q, const FbPrior *prior, double *out);

// Pure-DP parameter of randomized response over `m` candidates (infinite at `q = 0`).
//
// # Safety
// `out` must be writable.
FbStatus fb_rr_epsilon_dp(double q, uint64_t m, double *out);

// Closed-form mutual-information bound for the Gaussian mechanism with sensitivity `delta`.
//
// # Safety
// Pointers must be valid.
FbStatus fb_gaussian_thm2_mi(const FbPrior *prior, double delta, double sigma, double *out);

// Creates a Gaussian mechanism over `m` encodings of dimension `d`, stored row-major.
// The prior is copied.
//
// # Safety
// `encodings` must point to `m * d` doubles; other pointers must be valid.
FbStatus fb_gaussian_new(const double *encodings,
                         size_t m,
                         size_t d,
                         double sigma,
                         const FbPrior *prior,
                         FbGaussian **out);

// Releases a Gaussian mechanism. Null is ignored.
//
// # Safety
// `g` must come from `fb_gaussian_new` and not be used afterwards.
void fb_gaussian_free(FbGaussian *g);

// L2 sensitivity (largest pairwise encoding distance).
//
// # Safety
// Pointers must be valid.
FbStatus fb_gaussian_sensitivity(const FbGaussian *g, double *out);

// Monte-Carlo estimate of the mechanism's mutual information and its standard error.
//
// # Safety
// Pointers must be valid.
FbStatus fb_gaussian_mc_mi(const FbGaussian *g,
                           size_t n_samples,
                           uint64_t seed,
                           double *value,
                           double *stderr);

// Fano bound from a mutual-information budget in nats.
//
// # Safety
// Pointers must be valid.
FbStatus fb_fano_bound(double mi_nats, const FbPrior *prior, FbAdvantageBound *out);

// Generalized Fano bound from an order-`alpha` Arimoto-information budget.
//
// # Safety
// Pointers must be valid.
FbStatus fb_generalized_fano_bound(double info_nats,
                                   double alpha,
                                   const FbPrior *prior,
                                   FbAdvantageBound *out);

// Tightest generalized Fano bound for the linear RDP curve `slope * alpha`, searched
// over `n_alphas` orders (the default grid when `alphas` is null).
//
// # Safety
// `alphas` must be null or point to `n_alphas` doubles; other pointers must be valid.
FbStatus fb_generalized_fano_linear(double slope,
                                    const double *alphas,
                                    size_t n_alphas,
                                    const FbPrior *prior,
                                    FbAdvantageBound *out);

// Reconstruction-robustness baseline for the linear RDP curve `slope * alpha`.
// Requires a uniform prior.
//
// # Safety
// Pointers must be valid.
FbStatus fb_rero_linear(double slope, const FbPrior *prior, FbAdvantageBound *out);

// Simulates the reconstruction game against randomized response. `adv` is an `FbAdversary`.
//
// # Safety
// Pointers must be valid.
FbStatus fb_simulate_rr(double q,
                        const FbPrior *prior,
                        uint32_t adv,
                        uint64_t n_trials,
                        uint64_t seed,
                        FbTrialReport *out);

// Simulates the reconstruction game against a Gaussian mechanism, using its prior.
// `adv` is an `FbAdversary`.
//
// # Safety
// Pointers must be valid.
FbStatus fb_simulate_gaussian(const FbGaussian *g,
                              uint32_t adv,
                              uint64_t n_trials,
                              uint64_t seed,
                              FbTrialReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FANOBOUND_H */
