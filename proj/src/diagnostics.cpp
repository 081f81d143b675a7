#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "discrete_kle.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "textio.hpp"

namespace kle {

std::string report_to_csv(const StudyReport& report) {
  std::string out = csv_row(report.columns);
  std::vector<std::string> fields;
  for (const auto& row : report.rows) {
    fields.clear();
    for (double v : row) fields.push_back(format_double(v));
    out += csv_row(fields);
  }
  return out;
}

nlohmann::json report_to_json(const StudyReport& report) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : report.parameters) params[key] = value;
  nlohmann::json j{{"name", report.name},
                   {"parameters", params},
                   {"columns", report.columns},
                   {"row_count", report.rows.size()}};
  j["pass"] = report.pass.has_value() ? nlohmann::json(*report.pass)
                                      : nlohmann::json(nullptr);
  return j;
}

namespace {

// Eigenfunction values at a probe point for the positive-eigenvalue modes:
// nodal data when the point is a node, Nystrom extension otherwise.
Eigen::VectorXd probe_modes(const SpectralDecomposition& dec,
                            Eigen::Index positive, double x) {
  const Eigen::VectorXd& nodes = dec.rule.nodes();
  const double* begin = nodes.data();
  const double* end = begin + nodes.size();
  const double* hit = std::lower_bound(begin, end, x);
  if (hit != end && *hit == x) {
    return dec.eigvecs.row(hit - begin).head(positive).transpose();
  }
  Eigen::VectorXd weighted_row(nodes.size());
  for (Eigen::Index l = 0; l < nodes.size(); ++l) {
    weighted_row[l] = dec.rule.weights()[l] * dec.kernel.value(x, nodes[l]);
  }
  return (dec.eigvecs.leftCols(positive).transpose() * weighted_row)
      .cwiseQuotient(dec.lambdas.head(positive));
}

}  // namespace

double mercer_residual(const SpectralDecomposition& dec, Eigen::Index m,
                       const std::vector<double>& probe) {
  if (m < 0 || m > dec.modes()) {
    throw InvalidArgument("mercer residual rank out of range");
  }
  if (probe.empty()) {
    throw InvalidArgument("mercer residual needs at least one probe point");
  }
  for (double x : probe) {
    if (!dec.rule.interval().contains(x)) {
      throw InvalidArgument("probe point outside the interval");
    }
  }

  Eigen::Index positive = 0;
  while (positive < m && dec.lambdas[positive] > 0.0) ++positive;

  const Eigen::Index p = static_cast<Eigen::Index>(probe.size());
  Eigen::MatrixXd values(p, positive);
  for (Eigen::Index j = 0; j < p; ++j) {
    values.row(j) = probe_modes(dec, positive, probe[j]).transpose();
  }
  const Eigen::MatrixXd scaled =
      values * dec.lambdas.head(positive).asDiagonal();

  double residual = 0.0;
  const Eigen::Index block = 256;
  Eigen::MatrixXd partial;
  for (Eigen::Index lo = 0; lo < p; lo += block) {
    const Eigen::Index hi = std::min(p, lo + block);
    partial = scaled.middleRows(lo, hi - lo) * values.transpose();
    for (Eigen::Index j = lo; j < hi; ++j) {
      for (Eigen::Index l = 0; l < p; ++l) {
        const double diff =
            std::abs(dec.kernel.value(probe[j], probe[l]) - partial(j - lo, l));
        residual = std::max(residual, diff);
      }
    }
  }
  return residual;
}

double mercer_diagonal_residual(const SpectralDecomposition& dec,
                                Eigen::Index m,
                                const std::vector<double>& probe) {
  if (m < 0 || m > dec.modes()) {
    throw InvalidArgument("mercer residual rank out of range");
  }
  if (probe.empty()) {
    throw InvalidArgument("mercer residual needs at least one probe point");
  }
  Eigen::Index positive = 0;
  while (positive < m && dec.lambdas[positive] > 0.0) ++positive;

  double residual = 0.0;
  for (double x : probe) {
    if (!dec.rule.interval().contains(x)) {
      throw InvalidArgument("probe point outside the interval");
    }
    const Eigen::VectorXd modes = probe_modes(dec, positive, x);
    const double partial = dec.lambdas.head(positive).dot(modes.cwiseAbs2());
    residual = std::max(residual, std::abs(dec.kernel.value(x, x) - partial));
  }
  return residual;
}

TraceIdentity trace_identity_check(const SpectralDecomposition& dec) {
  if (dec.modes() != dec.grid_size()) {
    throw InvalidArgument(
        "trace identity needs the full spectrum (m = n modes)");
  }
  const double lambda_sum = dec.lambdas.sum();
  const double integral = integrate(
      dec.rule, [&](double x) { return dec.kernel.value(x, x); });
  return TraceIdentity{lambda_sum, integral,
                       std::abs(lambda_sum - integral)};
}

CoefficientStats coefficient_stats(const FieldEnsemble& ensemble) {
  const Eigen::Index count = ensemble.count();
  if (count < 100) {
    throw InvalidArgument("coefficient statistics need at least 100 samples");
  }
  CoefficientStats stats;
  stats.mean = ensemble.coeffs.colwise().mean();
  stats.second_moment = (ensemble.coeffs.transpose() * ensemble.coeffs) /
                        static_cast<double>(count);
  return stats;
}

namespace {

void check_w_orthonormal(const Eigen::VectorXd& weights,
                         const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd gram =
      basis.transpose() * weights.asDiagonal() * basis;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (defect > 1e-10) {
    throw InvalidArgument("basis columns are not W-orthonormal");
  }
}

}  // namespace

double basis_optimality_gap(const SpectralDecomposition& dec,
                            const Eigen::MatrixXd& kernel_entries,
                            const Eigen::MatrixXd& alt_basis) {
  const Eigen::Index r = alt_basis.cols();
  if (alt_basis.rows() != dec.grid_size() || r < 1 || r > dec.modes()) {
    throw InvalidArgument("alternative basis must be n x r, 1 <= r <= modes");
  }
  check_w_orthonormal(dec.rule.weights(), alt_basis);
  const Eigen::MatrixXd wu = dec.rule.weights().asDiagonal() * alt_basis;
  const double captured = (wu.transpose() * kernel_entries * wu).trace();
  return dec.lambdas.head(r).sum() - captured;
}

double basis_optimality_gap(const KernelSpec& spec, const QuadratureRule& rule,
                            Eigen::Index r, const Eigen::MatrixXd& alt_basis) {
  if (r != alt_basis.cols()) {
    throw InvalidArgument("rank does not match the basis column count");
  }
  const SpectralDecomposition dec = nystrom_eigen(spec, rule, r);
  const KernelMatrix km = kernel_matrix(spec, rule);
  return basis_optimality_gap(dec, km.entries, alt_basis);
}

StudyReport grid_refinement_study(const KernelSpec& spec,
                                  const std::vector<Eigen::Index>& index_set,
                                  const std::vector<Eigen::Index>& n_values,
                                  Eigen::Index n_ref) {
  if (index_set.empty() || n_values.empty()) {
    throw InvalidArgument("grid refinement study needs indices and grid sizes");
  }
  Eigen::Index max_k = 0;
  for (Eigen::Index k : index_set) {
    if (k < 1) throw InvalidArgument("eigenvalue indices are 1-based");
    max_k = std::max(max_k, k);
  }
  Eigen::Index max_n = 0;
  for (Eigen::Index n : n_values) {
    if (n < std::max<Eigen::Index>(2, max_k)) {
      throw InvalidArgument("grid size too small for the requested indices");
    }
    max_n = std::max(max_n, n);
  }
  if (n_ref < max_n) {
    throw InvalidArgument("reference grid must be at least as fine as the others");
  }

  const Interval& domain = spec.domain();
  const SpectralDecomposition ref =
      nystrom_eigen(spec, make_trapezoid(domain, n_ref), max_k);

  StudyReport report;
  report.name = "grid_refinement";
  report.parameters = {{"kernel", kernel_to_json(spec).dump()},
                       {"interval_a", format_double(domain.a)},
                       {"interval_b", format_double(domain.b)},
                       {"rule", "trapezoid"},
                       {"n_ref", std::to_string(n_ref)}};
  report.columns = {"n", "k", "relative_error"};
  for (Eigen::Index n : n_values) {
    const SpectralDecomposition dec =
        nystrom_eigen(spec, make_trapezoid(domain, n), max_k);
    for (Eigen::Index k : index_set) {
      const double ref_value = ref.lambdas[k - 1];
      const double err = std::abs(dec.lambdas[k - 1] - ref_value) / ref_value;
      report.rows.push_back({static_cast<double>(n), static_cast<double>(k),
                             err});
    }
  }
  return report;
}

StudyReport correlation_study(const Interval& interval, double sigma,
                              double x0, const std::vector<double>& y_grid,
                              const std::vector<double>& ells) {
  if (!interval.contains(x0)) {
    throw InvalidArgument("x0 outside the interval");
  }
  if (y_grid.empty() || ells.empty()) {
    throw InvalidArgument("correlation study needs y points and ell values");
  }
  StudyReport report;
  report.name = "correlation";
  report.parameters = {{"sigma", format_double(sigma)},
                       {"x0", format_double(x0)},
                       {"interval_a", format_double(interval.a)},
                       {"interval_b", format_double(interval.b)}};
  report.columns = {"ell", "y", "correlation"};
  for (double ell : ells) {
    const KernelSpec spec = KernelSpec::exponential(interval, sigma, ell);
    for (double y : y_grid) {
      const double corr = eval_kernel(spec, x0, y) / (sigma * sigma);
      report.rows.push_back({ell, y, corr});
    }
  }
  return report;
}

Eigen::MatrixXd w_orthonormalize(const Eigen::VectorXd& weights,
                                 Eigen::MatrixXd columns) {
  const Eigen::Index r = columns.cols();
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double proj =
            columns.col(i).dot(weights.cwiseProduct(columns.col(j)));
        columns.col(j) -= proj * columns.col(i);
      }
      const double norm = std::sqrt(
          columns.col(j).dot(weights.cwiseProduct(columns.col(j))));
      if (!(norm > 1e-12)) {
        throw NumericError("columns are numerically dependent");
      }
      columns.col(j) /= norm;
    }
  }
  return columns;
}

Eigen::MatrixXd random_w_orthonormal(const Eigen::VectorXd& weights,
                                     Eigen::Index r, std::uint64_t seed,
                                     std::uint64_t stream) {
  GaussianStream rng(seed, stream);
  Eigen::MatrixXd columns(weights.size(), r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      columns(i, j) = rng.next_normal();
    }
  }
  return w_orthonormalize(weights, std::move(columns));
}

Eigen::MatrixXd fourier_w_orthonormal(const QuadratureRule& rule,
                                      Eigen::Index r) {
  const Eigen::VectorXd& x = rule.nodes();
  const double a = rule.interval().a;
  const double len = rule.interval().length();
  Eigen::MatrixXd columns(x.size(), r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const Eigen::Index harmonic = (j + 1) / 2;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double t =
          2.0 * std::numbers::pi * static_cast<double>(harmonic) *
          (x[i] - a) / len;
      columns(i, j) = (j == 0) ? 1.0 : (j % 2 == 1 ? std::cos(t) : std::sin(t));
    }
  }
  return w_orthonormalize(rule.weights(), std::move(columns));
}

namespace {

StudyReport make_check(const std::string& name,
                       std::vector<std::pair<std::string, std::string>> params,
                       std::vector<std::string> columns,
                       std::vector<std::vector<double>> rows, bool pass) {
  StudyReport report;
  report.name = name;
  report.parameters = std::move(params);
  report.columns = std::move(columns);
  report.rows = std::move(rows);
  report.pass = pass;
  return report;
}

}  // namespace

std::vector<StudyReport> run_verification(const KernelSpec& spec,
                                          const QuadratureRule& rule,
                                          std::uint64_t seed) {
  std::vector<StudyReport> reports;
  const Eigen::Index n = rule.size();
  std::vector<std::pair<std::string, std::string>> base_params = {
      {"kernel", kernel_to_json(spec).dump()},
      {"n", std::to_string(n)},
      {"seed", std::to_string(seed)}};

  double diag_scale = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = rule.nodes()[k];
    diag_scale = std::max(diag_scale, std::abs(spec.value(x, x)));
  }

  // Admissibility gates everything else: an indefinite kernel has no KLE.
  const double adm_tol = 1e-10 * diag_scale;
  const AdmissibilityResult adm = admissibility_check(spec, rule, adm_tol);
  reports.push_back(make_check("admissibility", base_params,
                               {"min_eigenvalue", "tolerance"},
                               {{adm.min_eigenvalue, adm_tol}}, adm.pass));
  if (!adm.pass) return reports;

  const SpectralDecomposition full = nystrom_eigen(spec, rule, n);
  const double lead = std::max(full.lambdas[0], 0.0);

  {
    const TraceIdentity trace = trace_identity_check(full);
    const double bound = 1e-10 * std::max(std::abs(trace.integral), 1.0);
    reports.push_back(make_check(
        "trace_identity", base_params,
        {"lambda_sum", "integral", "gap", "bound"},
        {{trace.lambda_sum, trace.integral, trace.gap, bound}},
        trace.gap <= bound));
  }

  {
    std::vector<double> probe(rule.nodes().data(),
                              rule.nodes().data() + n);
    const std::vector<Eigen::Index> ms = {
        1, std::max<Eigen::Index>(1, n / 4), n};
    const double bound = 1e-8 * diag_scale;
    std::vector<std::vector<double>> rows;
    bool pass = true;
    double previous = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double res = mercer_diagonal_residual(full, ms[i], probe);
      rows.push_back({static_cast<double>(ms[i]), res});
      if (i > 0 && res > previous + 1e-12) pass = false;
      previous = res;
    }
    if (rows.back()[1] > bound) pass = false;
    auto params = base_params;
    params.emplace_back("bound", format_double(bound));
    reports.push_back(make_check("mercer_diagonal", params,
                                 {"m", "residual"}, std::move(rows), pass));
  }

  {
    const KernelMatrix km = kernel_matrix(spec, rule);
    const double slack = 1e-10 * std::max(lead, 1.0);
    std::vector<std::vector<double>> rows;
    bool pass = true;

    const Eigen::Index lead_r = std::min<Eigen::Index>(5, n);
    const double equality_gap = basis_optimality_gap(
        full, km.entries, full.eigvecs.leftCols(lead_r));
    rows.push_back({0.0, static_cast<double>(lead_r), equality_gap});
    if (std::abs(equality_gap) > slack) pass = false;

    const std::vector<Eigen::Index> ranks = {
        1, std::min<Eigen::Index>(5, n), std::min<Eigen::Index>(10, n)};
    int basis_index = 1;
    for (Eigen::Index r : ranks) {
      for (int rep = 0; rep < 10; ++rep, ++basis_index) {
        const Eigen::MatrixXd basis = random_w_orthonormal(
            rule.weights(), r, seed, static_cast<std::uint64_t>(basis_index));
        const double gap = basis_optimality_gap(full, km.entries, basis);
        rows.push_back({static_cast<double>(basis_index),
                        static_cast<double>(r), gap});
        if (gap < -slack) pass = false;
      }
    }
    auto params = base_params;
    params.emplace_back("slack", format_double(slack));
    reports.push_back(make_check("ky_fan", params,
                                 {"basis", "r", "gap"}, std::move(rows),
                                 pass));
  }

  {
    Eigen::Index positive = 0;
    while (positive < n && full.lambdas[positive] > 0.0) ++positive;
    const Eigen::Index r = std::min<Eigen::Index>(10, positive);
    auto params = base_params;
    if (r == 0) {
      reports.push_back(make_check("coefficient_stats", params,
                                   {"max_abs_mean", "mean_bound",
                                    "max_moment_deviation", "moment_bound"},
                                   {}, true));
      return reports;
    }
    const Eigen::Index count = 20000;
    const double rho = std::clamp(
        full.lambdas.head(r).sum() / full.lambdas.sum(), 0.0, 1.0);
    const TruncatedKLE model{truncate(full, r), MeanFunction::zero(), rho};
    const FieldEnsemble ensemble = sample(model, count, seed);
    const CoefficientStats stats = coefficient_stats(ensemble);

    const double mean_bound = 5.0 / std::sqrt(static_cast<double>(count));
    const double moment_bound =
        5.0 * std::sqrt(2.0 / static_cast<double>(count));
    const double max_mean = stats.mean.cwiseAbs().maxCoeff();
    const double max_dev =
        (stats.second_moment - Eigen::MatrixXd::Identity(r, r))
            .cwiseAbs()
            .maxCoeff();
    params.emplace_back("samples", std::to_string(count));
    params.emplace_back("r", std::to_string(r));
    reports.push_back(make_check(
        "coefficient_stats", params,
        {"max_abs_mean", "mean_bound", "max_moment_deviation", "moment_bound"},
        {{max_mean, mean_bound, max_dev, moment_bound}},
        max_mean <= mean_bound && max_dev <= moment_bound));
  }

  return reports;
}

}  // namespace kle
