#ifndef DECONV_DECONV_H
#define DECONV_DECONV_H

/* C interface to the deconvolution core.  All functions return a status code
 * (0 success, 2 configuration error, 3 numerical failure, 4 I/O error) and
 * leave a thread-local message readable via deconv_last_error().  Handles are
 * opaque and must be released with the matching _destroy function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DECONV_API __declspec(dllexport)
#else
#define DECONV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    DECONV_OK = 0,
    DECONV_ERR_CONFIG = 2,
    DECONV_ERR_NUMERIC = 3,
    DECONV_ERR_IO = 4
};

typedef struct deconv_noise deconv_noise;
typedef struct deconv_target deconv_target;
typedef struct deconv_process deconv_process;
typedef struct deconv_estimate deconv_estimate;

DECONV_API const char* deconv_version(void);
/* Message from the most recent failing call on this thread; empty otherwise. */
DECONV_API const char* deconv_last_error(void);

/* --- noise models: gaussian, cauchy, laplace, log_chi_squared, none ------ */

DECONV_API int deconv_noise_create(const char* name, double scale, deconv_noise** out);
DECONV_API void deconv_noise_destroy(deconv_noise* noise);
/* Delta(m) = (1/2pi) integral |f_eps*|^{-2} over the band; +inf if the value
 * exceeds double range (use the log form then). */
DECONV_API int deconv_noise_delta(const deconv_noise* noise, int m, double* out);
DECONV_API int deconv_noise_log_delta(const deconv_noise* noise, int m, double* out);
DECONV_API int deconv_noise_gamma(const deconv_noise* noise, int m, double* out);
DECONV_API int deconv_noise_lambda1(const deconv_noise* noise, double kappa, double* out);
DECONV_API int deconv_noise_lambda2(const deconv_noise* noise, double kappa0, double* out);

/* --- target densities ----------------------------------------------------- */

/* Parameters as parallel key/value arrays, e.g. keys = {"mean","sigma"}. */
DECONV_API int deconv_target_create(const char* name, const char* const* keys,
                                    const double* values, size_t n_params,
                                    deconv_target** out);
DECONV_API void deconv_target_destroy(deconv_target* target);
DECONV_API int deconv_target_bias_tail(const deconv_target* target, int m, double* out);
DECONV_API int deconv_target_sample(const deconv_target* target, size_t n, uint64_t seed,
                                    double* out);

/* --- dependent processes -------------------------------------------------- */

DECONV_API int deconv_process_create_iid(const deconv_target* target, deconv_process** out);
/* name in {bernoulli_ar, expanding_map, contractive_chain, linear_process};
 * contractive_chain takes kappa, innovation_sigma, optional burn_in;
 * linear_process takes innovation_sigma and coeff0..coeffK. */
DECONV_API int deconv_process_create(const char* name, const char* const* keys,
                                     const double* values, size_t n_params,
                                     deconv_process** out);
DECONV_API void deconv_process_destroy(deconv_process* process);
DECONV_API int deconv_process_generate(const deconv_process* process, size_t n, uint64_t seed,
                                       double* out);

/* --- penalized-contrast estimation ---------------------------------------- */

/* Penalty variants: "ordinary", "supersmooth", "refined_beta", "refined_tau",
 * "no_noise".  sum_beta / sum_tau may be NULL when the variant needs neither.
 * exact_kn nonzero selects the theorem-conforming k_n = n (n^2 noise-free);
 * zero selects the fast data-driven k_n. */
DECONV_API int deconv_estimate_run(const double* z, size_t n, const deconv_noise* noise,
                                   const char* penalty_variant, double a,
                                   const double* sum_beta, const double* sum_tau, int exact_kn,
                                   deconv_estimate** out);
DECONV_API void deconv_estimate_destroy(deconv_estimate* estimate);
DECONV_API int deconv_estimate_m_hat(const deconv_estimate* estimate, int* out);
DECONV_API int deconv_estimate_k_n(const deconv_estimate* estimate, int* out);
DECONV_API int deconv_estimate_m_n(const deconv_estimate* estimate, int* out);
/* Contrast and penalty per m over the selection grid {1..m_n}.  Either array
 * may be NULL; cap is the element capacity of the non-NULL arrays and
 * *written receives the grid size. */
DECONV_API int deconv_estimate_tables(const deconv_estimate* estimate, double* contrast,
                                      double* penalties, size_t cap, size_t* written);
/* Coefficient table of the selected estimate, 2 k_n + 1 complex entries in
 * j order; re/im may be NULL to query the size. */
DECONV_API int deconv_estimate_coefficients(const deconv_estimate* estimate, double* re,
                                            double* im, size_t cap, size_t* written);
DECONV_API int deconv_estimate_evaluate(const deconv_estimate* estimate, const double* xs,
                                        size_t count, double* out);

DECONV_API int deconv_penalty_value(const deconv_noise* noise, const char* penalty_variant,
                                    double a, const double* sum_beta, const double* sum_tau,
                                    int m, uint64_t n, double* out);

/* --- command-level entry points (the CLI is a thin shell over these) ------ */

/* config_path and overrides_text may each be NULL/empty; overrides win on
 * conflicting keys.  Output paths may be NULL to skip that artifact (the
 * estimate command requires at least one).  Every command writes a
 * <primary-output>.manifest.json sidecar with content digests. */
DECONV_API int deconv_cmd_estimate(const char* config_path, const char* overrides_text,
                                   const char* out_density_csv, const char* out_report_json);
DECONV_API int deconv_cmd_simulate(const char* config_path, const char* overrides_text,
                                   uint64_t seed, const char* out_csv);
DECONV_API int deconv_cmd_experiment(const char* config_path, const char* overrides_text,
                                     uint64_t seed, const char* out_report_json,
                                     const char* out_summary_csv);
DECONV_API int deconv_cmd_penalties(const char* config_path, const char* overrides_text,
                                    const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* DECONV_DECONV_H */
