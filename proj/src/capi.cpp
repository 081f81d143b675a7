#include "kle/kle.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "discrete_kle.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "kernels.hpp"
#include "nystrom.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

struct kle_rule {
  kle::QuadratureRule rule;
};
struct kle_kernel {
  kle::KernelSpec spec;
};
struct kle_decomp {
  kle::SpectralDecomposition dec;
};
struct kle_model {
  kle::TruncatedKLE kle;
};
struct kle_ensemble {
  kle::FieldEnsemble ensemble;
};
struct kle_report {
  kle::StudyReport report;
};

namespace {

thread_local std::string t_last_error;

void store_error(const std::string& message) { t_last_error = message; }

kle_status status_of(const kle::Error& error) {
  switch (error.code()) {
    case kle::ErrorCode::InvalidArgument:
      return KLE_ERROR_INVALID_ARGUMENT;
    case kle::ErrorCode::Numeric:
      return KLE_ERROR_NUMERIC;
    case kle::ErrorCode::InadmissibleKernel:
      return KLE_ERROR_INADMISSIBLE_KERNEL;
    case kle::ErrorCode::DegenerateMode:
      return KLE_ERROR_DEGENERATE_MODE;
    case kle::ErrorCode::InsufficientSpectrum:
      return KLE_ERROR_INSUFFICIENT_SPECTRUM;
  }
  return KLE_ERROR_UNKNOWN;
}

template <typename Fn>
kle_status guarded(Fn&& fn) {
  try {
    fn();
    return KLE_OK;
  } catch (const kle::Error& error) {
    store_error(error.what());
    return status_of(error);
  } catch (const std::exception& error) {
    store_error(error.what());
    return KLE_ERROR_UNKNOWN;
  } catch (...) {
    store_error("unknown failure");
    return KLE_ERROR_UNKNOWN;
  }
}

kle_status require(bool condition, const char* message) {
  if (condition) return KLE_OK;
  store_error(message);
  return KLE_ERROR_INVALID_ARGUMENT;
}

kle::MeanFunction mean_from_nodes(const kle::QuadratureRule& rule,
                                  const double* mean_nodes) {
  if (mean_nodes == nullptr) return kle::MeanFunction::zero();
  Eigen::VectorXd values =
      Eigen::Map<const Eigen::VectorXd>(mean_nodes, rule.size());
  return kle::MeanFunction::grid(rule.nodes(), std::move(values));
}

}  // namespace

extern "C" {

const char* kle_status_name(kle_status status) {
  switch (status) {
    case KLE_OK:
      return "ok";
    case KLE_ERROR_INVALID_ARGUMENT:
      return "invalid-argument";
    case KLE_ERROR_NUMERIC:
      return "numeric-error";
    case KLE_ERROR_INADMISSIBLE_KERNEL:
      return "inadmissible-kernel";
    case KLE_ERROR_DEGENERATE_MODE:
      return "degenerate-mode";
    case KLE_ERROR_INSUFFICIENT_SPECTRUM:
      return "insufficient-spectrum";
    case KLE_ERROR_UNKNOWN:
      return "unknown-error";
  }
  return "unknown-error";
}

const char* kle_last_error(void) { return t_last_error.c_str(); }

void kle_set_max_threads(int32_t threads) { kle::set_max_threads(threads); }

/* -- quadrature ---------------------------------------------------------- */

kle_status kle_rule_trapezoid(double a, double b, int32_t n, kle_rule** out) {
  if (kle_status s = require(out != nullptr, "out pointer is null"); s) return s;
  return guarded([&] {
    *out = new kle_rule{kle::make_trapezoid(kle::Interval(a, b), n)};
  });
}

kle_status kle_rule_gauss_legendre(double a, double b, int32_t n,
                                   kle_rule** out) {
  if (kle_status s = require(out != nullptr, "out pointer is null"); s) return s;
  return guarded([&] {
    *out = new kle_rule{kle::make_gauss_legendre(kle::Interval(a, b), n)};
  });
}

int32_t kle_rule_size(const kle_rule* rule) {
  return rule == nullptr ? -1 : static_cast<int32_t>(rule->rule.size());
}

kle_status kle_rule_nodes(const kle_rule* rule, double* out) {
  if (kle_status s = require(rule && out, "null argument"); s) return s;
  Eigen::Map<Eigen::VectorXd>(out, rule->rule.size()) = rule->rule.nodes();
  return KLE_OK;
}

kle_status kle_rule_weights(const kle_rule* rule, double* out) {
  if (kle_status s = require(rule && out, "null argument"); s) return s;
  Eigen::Map<Eigen::VectorXd>(out, rule->rule.size()) = rule->rule.weights();
  return KLE_OK;
}

kle_status kle_integrate(const kle_rule* rule, kle_fn1 f, void* ctx,
                         double* out) {
  if (kle_status s = require(rule && f && out, "null argument"); s) return s;
  return guarded([&] {
    *out = kle::integrate(rule->rule, [&](double x) { return f(x, ctx); });
  });
}

void kle_rule_free(kle_rule* rule) { delete rule; }

/* -- kernels ------------------------------------------------------------- */

kle_status kle_kernel_exponential(double a, double b, double sigma, double ell,
                                  kle_kernel** out) {
  if (kle_status s = require(out != nullptr, "out pointer is null"); s) return s;
  return guarded([&] {
    *out = new kle_kernel{
        kle::KernelSpec::exponential(kle::Interval(a, b), sigma, ell)};
  });
}

kle_status kle_kernel_constant(double a, double b, double sigma,
                               kle_kernel** out) {
  if (kle_status s = require(out != nullptr, "out pointer is null"); s) return s;
  return guarded([&] {
    *out = new kle_kernel{
        kle::KernelSpec::constant(kle::Interval(a, b), sigma)};
  });
}

kle_status kle_kernel_brownian_min(double a, double b, kle_kernel** out) {
  if (kle_status s = require(out != nullptr, "out pointer is null"); s) return s;
  return guarded([&] {
    *out = new kle_kernel{kle::KernelSpec::brownian_min(kle::Interval(a, b))};
  });
}

kle_status kle_kernel_custom(double a, double b, kle_fn2 f, void* ctx,
                             kle_kernel** out) {
  if (kle_status s = require(out && f, "null argument"); s) return s;
  return guarded([&] {
    *out = new kle_kernel{kle::KernelSpec::custom(
        kle::Interval(a, b), [f, ctx](double x, double y) { return f(x, y, ctx); })};
  });
}

kle_status kle_kernel_from_json(const char* json_text, double a, double b,
                                kle_kernel** out) {
  if (kle_status s = require(json_text && out, "null argument"); s) return s;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded()) {
      throw kle::InvalidArgument("kernel spec is not valid JSON");
    }
    *out = new kle_kernel{kle::kernel_from_json(j, kle::Interval(a, b))};
  });
}

kle_status kle_kernel_eval(const kle_kernel* kernel, double x, double y,
                           double* out) {
  if (kle_status s = require(kernel && out, "null argument"); s) return s;
  return guarded([&] { *out = kle::eval_kernel(kernel->spec, x, y); });
}

kle_status kle_kernel_admissible(const kle_kernel* kernel,
                                 const kle_rule* rule, double tol,
                                 int32_t* pass, double* min_eigenvalue) {
  if (kle_status s = require(kernel && rule && pass && min_eigenvalue,
                             "null argument");
      s) {
    return s;
  }
  return guarded([&] {
    const kle::AdmissibilityResult result =
        kle::admissibility_check(kernel->spec, rule->rule, tol);
    *pass = result.pass ? 1 : 0;
    *min_eigenvalue = result.min_eigenvalue;
  });
}

void kle_kernel_free(kle_kernel* kernel) { delete kernel; }

/* -- spectral decomposition ---------------------------------------------- */

kle_status kle_decomp_compute(const kle_kernel* kernel, const kle_rule* rule,
                              int32_t modes, kle_decomp** out) {
  if (kle_status s = require(kernel && rule && out, "null argument"); s) return s;
  return guarded([&] {
    *out = new kle_decomp{kle::nystrom_eigen(kernel->spec, rule->rule, modes)};
  });
}

int32_t kle_decomp_modes(const kle_decomp* dec) {
  return dec == nullptr ? -1 : static_cast<int32_t>(dec->dec.modes());
}

int32_t kle_decomp_grid_size(const kle_decomp* dec) {
  return dec == nullptr ? -1 : static_cast<int32_t>(dec->dec.grid_size());
}

kle_status kle_decomp_eigenvalues(const kle_decomp* dec, double* out) {
  if (kle_status s = require(dec && out, "null argument"); s) return s;
  Eigen::Map<Eigen::VectorXd>(out, dec->dec.modes()) = dec->dec.lambdas;
  return KLE_OK;
}

kle_status kle_decomp_eigenvector(const kle_decomp* dec, int32_t mode,
                                  double* out) {
  if (kle_status s = require(dec && out, "null argument"); s) return s;
  if (kle_status s = require(mode >= 0 && mode < dec->dec.modes(),
                             "mode index out of range");
      s) {
    return s;
  }
  Eigen::Map<Eigen::VectorXd>(out, dec->dec.grid_size()) =
      dec->dec.eigvecs.col(mode);
  return KLE_OK;
}

kle_status kle_decomp_extend(const kle_decomp* dec, int32_t mode, double x,
                             double* out) {
  if (kle_status s = require(dec && out, "null argument"); s) return s;
  return guarded([&] { *out = kle::nystrom_extend(dec->dec, mode, x); });
}

void kle_decomp_free(kle_decomp* dec) { delete dec; }

/* -- truncated KLE field model -------------------------------------------- */

kle_status kle_model_fixed_rank(const kle_kernel* kernel, const kle_rule* rule,
                                const double* mean_nodes, int32_t rank,
                                kle_model** out) {
  if (kle_status s = require(kernel && rule && out, "null argument"); s) return s;
  return guarded([&] {
    *out = new kle_model{kle::build_truncated_kle(
        kernel->spec, rule->rule, mean_from_nodes(rule->rule, mean_nodes),
        kle::RankSelection::fixed(rank))};
  });
}

kle_status kle_model_threshold(const kle_kernel* kernel, const kle_rule* rule,
                               const double* mean_nodes, double threshold,
                               kle_model** out) {
  if (kle_status s = require(kernel && rule && out, "null argument"); s) return s;
  return guarded([&] {
    *out = new kle_model{kle::build_truncated_kle(
        kernel->spec, rule->rule, mean_from_nodes(rule->rule, mean_nodes),
        kle::RankSelection::threshold(threshold))};
  });
}

int32_t kle_model_rank(const kle_model* model) {
  return model == nullptr ? -1 : static_cast<int32_t>(model->kle.rank());
}

double kle_model_rho(const kle_model* model) {
  return model == nullptr ? -1.0 : model->kle.rho;
}

double kle_model_average_variance(const kle_model* model) {
  return model == nullptr ? -1.0 : kle::average_variance(model->kle);
}

kle_status kle_model_eigenvalues(const kle_model* model, double* out) {
  if (kle_status s = require(model && out, "null argument"); s) return s;
  Eigen::Map<Eigen::VectorXd>(out, model->kle.rank()) =
      model->kle.dec.lambdas;
  return KLE_OK;
}

kle_status kle_model_pointwise_variance(const kle_model* model, double x,
                                        double* out) {
  if (kle_status s = require(model && out, "null argument"); s) return s;
  return guarded([&] { *out = kle::pointwise_variance(model->kle, x); });
}

void kle_model_free(kle_model* model) { delete model; }

/* -- sampling ------------------------------------------------------------- */

kle_status kle_sample(const kle_model* model, int32_t count, uint64_t seed,
                      kle_ensemble** out) {
  if (kle_status s = require(model && out, "null argument"); s) return s;
  return guarded([&] {
    *out = new kle_ensemble{kle::sample(model->kle, count, seed)};
  });
}

kle_status kle_sample_with_coefficients(const kle_model* model,
                                        const double* coeffs, int32_t count,
                                        kle_ensemble** out) {
  if (kle_status s = require(model && coeffs && out, "null argument"); s) {
    return s;
  }
  if (kle_status s = require(count >= 1, "count must be >= 1"); s) return s;
  return guarded([&] {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>;
    Eigen::MatrixXd matrix =
        Eigen::Map<const RowMajor>(coeffs, count, model->kle.rank());
    *out = new kle_ensemble{
        kle::sample_with_coefficients(model->kle, std::move(matrix))};
  });
}

int32_t kle_ensemble_count(const kle_ensemble* ensemble) {
  return ensemble == nullptr ? -1
                             : static_cast<int32_t>(ensemble->ensemble.count());
}

int32_t kle_ensemble_rank(const kle_ensemble* ensemble) {
  return ensemble == nullptr
             ? -1
             : static_cast<int32_t>(ensemble->ensemble.kle.rank());
}

kle_status kle_ensemble_coefficients(const kle_ensemble* ensemble,
                                     double* out) {
  if (kle_status s = require(ensemble && out, "null argument"); s) return s;
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(out, ensemble->ensemble.coeffs.rows(),
                       ensemble->ensemble.coeffs.cols()) =
      ensemble->ensemble.coeffs;
  return KLE_OK;
}

kle_status kle_ensemble_value(const kle_ensemble* ensemble, int32_t sample,
                              double x, double* out) {
  if (kle_status s = require(ensemble && out, "null argument"); s) return s;
  return guarded([&] { *out = kle::evaluate(ensemble->ensemble, sample, x); });
}

kle_status kle_ensemble_values_on_nodes(const kle_ensemble* ensemble,
                                        int32_t sample, double* out) {
  return kle_ensemble_truncated_values(ensemble, sample, -1, out);
}

kle_status kle_ensemble_truncated_values(const kle_ensemble* ensemble,
                                         int32_t sample, int32_t rank,
                                         double* out) {
  if (kle_status s = require(ensemble && out, "null argument"); s) return s;
  return guarded([&] {
    const Eigen::VectorXd values =
        kle::evaluate_on_nodes(ensemble->ensemble, sample, rank);
    Eigen::Map<Eigen::VectorXd>(out, values.size()) = values;
  });
}

kle_status kle_ensemble_log_normal(const kle_ensemble* ensemble,
                                   int32_t sample, double x, double* out) {
  if (kle_status s = require(ensemble && out, "null argument"); s) return s;
  return guarded([&] {
    *out = kle::log_normal_field(ensemble->ensemble, sample, x);
  });
}

void kle_ensemble_free(kle_ensemble* ensemble) { delete ensemble; }

/* -- diagnostics ----------------------------------------------------------- */

kle_status kle_mercer_residual(const kle_decomp* dec, int32_t modes,
                               const double* probe, int32_t probe_len,
                               double* out) {
  if (kle_status s = require(dec && probe && out, "null argument"); s) return s;
  if (kle_status s = require(probe_len > 0, "probe must be non-empty"); s) {
    return s;
  }
  return guarded([&] {
    std::vector<double> points(probe, probe + probe_len);
    *out = kle::mercer_residual(dec->dec, modes, points);
  });
}

kle_status kle_trace_identity(const kle_decomp* dec, double* lambda_sum,
                              double* integral, double* gap) {
  if (kle_status s = require(dec && lambda_sum && integral && gap,
                             "null argument");
      s) {
    return s;
  }
  return guarded([&] {
    const kle::TraceIdentity trace = kle::trace_identity_check(dec->dec);
    *lambda_sum = trace.lambda_sum;
    *integral = trace.integral;
    *gap = trace.gap;
  });
}

kle_status kle_study_grid_refinement(const kle_kernel* kernel,
                                     const int32_t* mode_indices,
                                     int32_t index_count,
                                     const int32_t* grid_sizes,
                                     int32_t size_count, int32_t reference_n,
                                     kle_report** out) {
  if (kle_status s = require(kernel && mode_indices && grid_sizes && out,
                             "null argument");
      s) {
    return s;
  }
  if (kle_status s = require(index_count > 0 && size_count > 0,
                             "index and size lists must be non-empty");
      s) {
    return s;
  }
  return guarded([&] {
    std::vector<Eigen::Index> ks(mode_indices, mode_indices + index_count);
    std::vector<Eigen::Index> ns(grid_sizes, grid_sizes + size_count);
    *out = new kle_report{
        kle::grid_refinement_study(kernel->spec, ks, ns, reference_n)};
  });
}

kle_status kle_study_correlation(double a, double b, double sigma, double x0,
                                 const double* ells, int32_t ell_count,
                                 const double* ys, int32_t y_count,
                                 kle_report** out) {
  if (kle_status s = require(ells && ys && out, "null argument"); s) return s;
  if (kle_status s = require(ell_count > 0 && y_count > 0,
                             "ell and y lists must be non-empty");
      s) {
    return s;
  }
  return guarded([&] {
    std::vector<double> ell_list(ells, ells + ell_count);
    std::vector<double> y_list(ys, ys + y_count);
    *out = new kle_report{kle::correlation_study(kle::Interval(a, b), sigma,
                                                 x0, y_list, ell_list)};
  });
}

kle_status kle_verify(const kle_kernel* kernel, const kle_rule* rule,
                      uint64_t seed, kle_report*** out_reports,
                      int32_t* out_count) {
  if (kle_status s = require(kernel && rule && out_reports && out_count,
                             "null argument");
      s) {
    return s;
  }
  return guarded([&] {
    std::vector<kle::StudyReport> reports =
        kle::run_verification(kernel->spec, rule->rule, seed);
    auto** array = new kle_report*[reports.size()];
    for (std::size_t i = 0; i < reports.size(); ++i) {
      array[i] = new kle_report{std::move(reports[i])};
    }
    *out_reports = array;
    *out_count = static_cast<int32_t>(reports.size());
  });
}

void kle_report_array_free(kle_report** reports, int32_t count) {
  if (reports == nullptr) return;
  for (int32_t i = 0; i < count; ++i) delete reports[i];
  delete[] reports;
}

/* -- reports --------------------------------------------------------------- */

const char* kle_report_name(const kle_report* report) {
  return report == nullptr ? "" : report->report.name.c_str();
}

int32_t kle_report_columns(const kle_report* report) {
  return report == nullptr
             ? -1
             : static_cast<int32_t>(report->report.columns.size());
}

int32_t kle_report_rows(const kle_report* report) {
  return report == nullptr ? -1
                           : static_cast<int32_t>(report->report.rows.size());
}

const char* kle_report_column_name(const kle_report* report, int32_t column) {
  if (report == nullptr || column < 0 ||
      column >= static_cast<int32_t>(report->report.columns.size())) {
    return "";
  }
  return report->report.columns[column].c_str();
}

kle_status kle_report_row(const kle_report* report, int32_t row, double* out) {
  if (kle_status s = require(report && out, "null argument"); s) return s;
  if (kle_status s =
          require(row >= 0 &&
                      row < static_cast<int32_t>(report->report.rows.size()),
                  "row index out of range");
      s) {
    return s;
  }
  const std::vector<double>& values = report->report.rows[row];
  std::memcpy(out, values.data(), values.size() * sizeof(double));
  return KLE_OK;
}

int32_t kle_report_params(const kle_report* report) {
  return report == nullptr
             ? -1
             : static_cast<int32_t>(report->report.parameters.size());
}

const char* kle_report_param_key(const kle_report* report, int32_t index) {
  if (report == nullptr || index < 0 ||
      index >= static_cast<int32_t>(report->report.parameters.size())) {
    return "";
  }
  return report->report.parameters[index].first.c_str();
}

const char* kle_report_param_value(const kle_report* report, int32_t index) {
  if (report == nullptr || index < 0 ||
      index >= static_cast<int32_t>(report->report.parameters.size())) {
    return "";
  }
  return report->report.parameters[index].second.c_str();
}

int32_t kle_report_pass(const kle_report* report) {
  if (report == nullptr || !report->report.pass.has_value()) return -1;
  return *report->report.pass ? 1 : 0;
}

void kle_report_free(kle_report* report) { delete report; }

}  // extern "C"
