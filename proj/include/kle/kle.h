/* C interface to the KLE library.
 *
 * Every object is an opaque handle created by a kle_*_ function and released
 * with the matching kle_*_free. Functions that can fail return a kle_status;
 * on failure the out-parameters are untouched and kle_last_error() carries a
 * thread-local message describing what went wrong.
 */
#ifndef KLE_H
#define KLE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kle_status {
  KLE_OK = 0,
  KLE_ERROR_INVALID_ARGUMENT = 1,
  KLE_ERROR_NUMERIC = 2,
  KLE_ERROR_INADMISSIBLE_KERNEL = 3,
  KLE_ERROR_DEGENERATE_MODE = 4,
  KLE_ERROR_INSUFFICIENT_SPECTRUM = 5,
  KLE_ERROR_UNKNOWN = 6
} kle_status;

typedef struct kle_rule kle_rule;         /* quadrature rule */
typedef struct kle_kernel kle_kernel;     /* covariance function */
typedef struct kle_decomp kle_decomp;     /* discrete spectral decomposition */
typedef struct kle_model kle_model;       /* truncated KLE field model */
typedef struct kle_ensemble kle_ensemble; /* sampled realizations */
typedef struct kle_report kle_report;     /* study / check report */

typedef double (*kle_fn1)(double x, void* ctx);
typedef double (*kle_fn2)(double x, double y, void* ctx);

const char* kle_status_name(kle_status status);
const char* kle_last_error(void);
void kle_set_max_threads(int32_t threads);

/* -- quadrature ---------------------------------------------------------- */

kle_status kle_rule_trapezoid(double a, double b, int32_t n, kle_rule** out);
kle_status kle_rule_gauss_legendre(double a, double b, int32_t n,
                                   kle_rule** out);
int32_t kle_rule_size(const kle_rule* rule);
kle_status kle_rule_nodes(const kle_rule* rule, double* out);
kle_status kle_rule_weights(const kle_rule* rule, double* out);
kle_status kle_integrate(const kle_rule* rule, kle_fn1 f, void* ctx,
                         double* out);
void kle_rule_free(kle_rule* rule);

/* -- kernels ------------------------------------------------------------- */

kle_status kle_kernel_exponential(double a, double b, double sigma,
                                  double ell, kle_kernel** out);
kle_status kle_kernel_constant(double a, double b, double sigma,
                               kle_kernel** out);
kle_status kle_kernel_brownian_min(double a, double b, kle_kernel** out);
kle_status kle_kernel_custom(double a, double b, kle_fn2 f, void* ctx,
                             kle_kernel** out);
/* json_text follows the config schema, e.g.
 * {"kernel": "exponential", "sigma": 1.0, "ell": 0.0625}. */
kle_status kle_kernel_from_json(const char* json_text, double a, double b,
                                kle_kernel** out);
kle_status kle_kernel_eval(const kle_kernel* kernel, double x, double y,
                           double* out);
kle_status kle_kernel_admissible(const kle_kernel* kernel,
                                 const kle_rule* rule, double tol,
                                 int32_t* pass, double* min_eigenvalue);
void kle_kernel_free(kle_kernel* kernel);

/* -- spectral decomposition ---------------------------------------------- */

kle_status kle_decomp_compute(const kle_kernel* kernel, const kle_rule* rule,
                              int32_t modes, kle_decomp** out);
int32_t kle_decomp_modes(const kle_decomp* dec);
int32_t kle_decomp_grid_size(const kle_decomp* dec);
kle_status kle_decomp_eigenvalues(const kle_decomp* dec, double* out);
kle_status kle_decomp_eigenvector(const kle_decomp* dec, int32_t mode,
                                  double* out);
kle_status kle_decomp_extend(const kle_decomp* dec, int32_t mode, double x,
                             double* out);
void kle_decomp_free(kle_decomp* dec);

/* -- truncated KLE field model -------------------------------------------
 * mean_nodes is either NULL (zero mean) or one value per quadrature node,
 * interpolated linearly between nodes. */

kle_status kle_model_fixed_rank(const kle_kernel* kernel, const kle_rule* rule,
                                const double* mean_nodes, int32_t rank,
                                kle_model** out);
kle_status kle_model_threshold(const kle_kernel* kernel, const kle_rule* rule,
                               const double* mean_nodes, double threshold,
                               kle_model** out);
int32_t kle_model_rank(const kle_model* model);
double kle_model_rho(const kle_model* model);
double kle_model_average_variance(const kle_model* model);
kle_status kle_model_eigenvalues(const kle_model* model, double* out);
kle_status kle_model_pointwise_variance(const kle_model* model, double x,
                                        double* out);
void kle_model_free(kle_model* model);

/* -- sampling ------------------------------------------------------------ */

kle_status kle_sample(const kle_model* model, int32_t count, uint64_t seed,
                      kle_ensemble** out);
/* coeffs: count x rank, row-major; the test hook for forcing coefficients. */
kle_status kle_sample_with_coefficients(const kle_model* model,
                                        const double* coeffs, int32_t count,
                                        kle_ensemble** out);
int32_t kle_ensemble_count(const kle_ensemble* ensemble);
int32_t kle_ensemble_rank(const kle_ensemble* ensemble);
kle_status kle_ensemble_coefficients(const kle_ensemble* ensemble,
                                     double* out);
kle_status kle_ensemble_value(const kle_ensemble* ensemble, int32_t sample,
                              double x, double* out);
kle_status kle_ensemble_values_on_nodes(const kle_ensemble* ensemble,
                                        int32_t sample, double* out);
/* Same realization truncated to its leading `rank` modes. */
kle_status kle_ensemble_truncated_values(const kle_ensemble* ensemble,
                                         int32_t sample, int32_t rank,
                                         double* out);
kle_status kle_ensemble_log_normal(const kle_ensemble* ensemble,
                                   int32_t sample, double x, double* out);
void kle_ensemble_free(kle_ensemble* ensemble);

/* -- diagnostics ---------------------------------------------------------- */

kle_status kle_mercer_residual(const kle_decomp* dec, int32_t modes,
                               const double* probe, int32_t probe_len,
                               double* out);
kle_status kle_trace_identity(const kle_decomp* dec, double* lambda_sum,
                              double* integral, double* gap);
kle_status kle_study_grid_refinement(const kle_kernel* kernel,
                                     const int32_t* mode_indices,
                                     int32_t index_count,
                                     const int32_t* grid_sizes,
                                     int32_t size_count, int32_t reference_n,
                                     kle_report** out);
kle_status kle_study_correlation(double a, double b, double sigma, double x0,
                                 const double* ells, int32_t ell_count,
                                 const double* ys, int32_t y_count,
                                 kle_report** out);
/* Runs the bundled checks; the caller owns the returned report array. */
kle_status kle_verify(const kle_kernel* kernel, const kle_rule* rule,
                      uint64_t seed, kle_report*** out_reports,
                      int32_t* out_count);
void kle_report_array_free(kle_report** reports, int32_t count);

/* -- reports -------------------------------------------------------------- */

const char* kle_report_name(const kle_report* report);
int32_t kle_report_columns(const kle_report* report);
int32_t kle_report_rows(const kle_report* report);
const char* kle_report_column_name(const kle_report* report, int32_t column);
kle_status kle_report_row(const kle_report* report, int32_t row, double* out);
int32_t kle_report_params(const kle_report* report);
const char* kle_report_param_key(const kle_report* report, int32_t index);
const char* kle_report_param_value(const kle_report* report, int32_t index);
/* 1 = pass, 0 = fail, -1 = not a pass/fail check. */
int32_t kle_report_pass(const kle_report* report);
void kle_report_free(kle_report* report);

#ifdef __cplusplus
}
#endif

#endif /* KLE_H */
