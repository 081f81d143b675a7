#include <cmath>

#include "diagnostics.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "test_support.hpp"

using kle::Interval;
using kle::KernelSpec;
using kle::SpectralDecomposition;
using kle::StudyReport;

namespace {

const Interval kUnit(0.0, 1.0);

std::vector<double> nodes_and_midpoints(const kle::QuadratureRule& rule) {
  std::vector<double> probe;
  const Eigen::VectorXd& x = rule.nodes();
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    probe.push_back(x[k]);
    if (k + 1 < x.size()) probe.push_back(0.5 * (x[k] + x[k + 1]));
  }
  return probe;
}

}  // namespace

TEST_CASE("mercer residual of the constant kernel vanishes at rank one") {
  const KernelSpec spec = KernelSpec::constant(kUnit, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 31);
  const SpectralDecomposition dec = kle::nystrom_eigen(spec, rule, 1);
  const double residual =
      kle::mercer_residual(dec, 1, nodes_and_midpoints(rule));
  CHECK(residual <= 1e-10);
}

TEST_CASE("mercer residual decreases with more modes") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 200);
  const SpectralDecomposition dec = kle::nystrom_eigen(spec, rule, 200);
  const std::vector<double> probe = nodes_and_midpoints(rule);
  const double at10 = kle::mercer_residual(dec, 10, probe);
  const double at100 = kle::mercer_residual(dec, 100, probe);
  CHECK(at100 < at10);
  CHECK(kle::mercer_residual(dec, 200, probe) <=
        kle::mercer_residual(dec, 1, probe));
}

TEST_CASE("full-spectrum mercer residual at the nodes is solver noise") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 0.5);
  const auto rule = kle::make_trapezoid(kUnit, 150);
  const SpectralDecomposition dec = kle::nystrom_eigen(spec, rule, 150);
  std::vector<double> probe(rule.nodes().data(),
                            rule.nodes().data() + rule.size());
  CHECK(kle::mercer_residual(dec, 150, probe) <= 1e-8);
}

TEST_CASE("diagonal mercer residual is monotone in m") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 200);
  const SpectralDecomposition dec = kle::nystrom_eigen(spec, rule, 200);
  std::vector<double> probe(rule.nodes().data(),
                            rule.nodes().data() + rule.size());
  double previous = kle::mercer_diagonal_residual(dec, 0, probe);
  for (Eigen::Index m : {1, 5, 20, 100, 200}) {
    const double res = kle::mercer_diagonal_residual(dec, m, probe);
    CHECK(res <= previous + 1e-12);
    previous = res;
  }
  CHECK(previous <= 1e-8);
}

TEST_CASE("mercer residual argument validation") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 20);
  const SpectralDecomposition dec = kle::nystrom_eigen(spec, rule, 5);
  CHECK_THROWS_AS(kle::mercer_residual(dec, 6, {0.5}), kle::InvalidArgument);
  CHECK_THROWS_AS(kle::mercer_residual(dec, 2, {}), kle::InvalidArgument);
  CHECK_THROWS_AS(kle::mercer_residual(dec, 2, {1.5}), kle::InvalidArgument);
}

TEST_CASE("trace identity for the built-in kernels") {
  {
    const auto rule = kle::make_trapezoid(kUnit, 100);
    const auto dec =
        kle::nystrom_eigen(KernelSpec::exponential(kUnit, 1.0, 1.0), rule, 100);
    const auto trace = kle::trace_identity_check(dec);
    CHECK(trace.integral == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace.lambda_sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(trace.gap <= 1e-10);
  }
  {
    const Interval wide(0.0, 3.0);
    const auto rule = kle::make_trapezoid(wide, 40);
    const auto dec =
        kle::nystrom_eigen(KernelSpec::constant(wide, 2.0), rule, 40);
    const auto trace = kle::trace_identity_check(dec);
    CHECK(trace.integral == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(trace.lambda_sum == doctest::Approx(12.0).epsilon(1e-10));
  }
  {
    const auto rule = kle::make_trapezoid(kUnit, 101);
    const auto dec =
        kle::nystrom_eigen(KernelSpec::brownian_min(), rule, 101);
    const auto trace = kle::trace_identity_check(dec);
    CHECK(std::abs(trace.integral - 0.5) <= 1e-14);
    CHECK(trace.gap <= 1e-10 * 0.5);
  }
}

TEST_CASE("trace identity requires the full spectrum") {
  const auto rule = kle::make_trapezoid(kUnit, 30);
  const auto dec =
      kle::nystrom_eigen(KernelSpec::exponential(kUnit, 1.0, 1.0), rule, 10);
  CHECK_THROWS_AS(kle::trace_identity_check(dec), kle::InvalidArgument);
}

TEST_CASE("a tampered spectrum fails the trace identity") {
  const auto rule = kle::make_trapezoid(kUnit, 60);
  auto dec =
      kle::nystrom_eigen(KernelSpec::exponential(kUnit, 1.0, 1.0), rule, 60);
  dec.lambdas[0] *= 1.0 + 1e-3;
  const auto trace = kle::trace_identity_check(dec);
  CHECK(trace.gap > 1e-10 * std::max(trace.integral, 1.0));
}

TEST_CASE("coefficient statistics of a forced ensemble are zero") {
  const auto model = kle::build_truncated_kle(
      KernelSpec::exponential(kUnit, 1.0, 1.0), kle::make_trapezoid(kUnit, 40),
      kle::MeanFunction::zero(), kle::RankSelection::fixed(3));
  const auto forced =
      kle::sample_with_coefficients(model, Eigen::MatrixXd::Zero(100, 3));
  const auto stats = kle::coefficient_stats(forced);
  CHECK(stats.mean.cwiseAbs().maxCoeff() == 0.0);
  CHECK(stats.second_moment.cwiseAbs().maxCoeff() == 0.0);

  const auto tiny =
      kle::sample_with_coefficients(model, Eigen::MatrixXd::Zero(99, 3));
  CHECK_THROWS_AS(kle::coefficient_stats(tiny), kle::InvalidArgument);
}

TEST_CASE("coefficient statistics of a seeded Gaussian ensemble") {
  const auto model = kle::build_truncated_kle(
      KernelSpec::exponential(kUnit, 1.0, 1.0), kle::make_trapezoid(kUnit, 51),
      kle::MeanFunction::zero(), kle::RankSelection::fixed(10));
  const Eigen::Index count = 100000;
  const auto ensemble = kle::sample(model, count, 424242);
  const auto stats = kle::coefficient_stats(ensemble);
  CHECK(stats.mean.cwiseAbs().maxCoeff() <= 0.016);
  const Eigen::MatrixXd deviation =
      stats.second_moment - Eigen::MatrixXd::Identity(10, 10);
  CHECK(deviation.cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("basis optimality gap vanishes on the leading eigenbasis") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 80);
  const SpectralDecomposition dec = kle::nystrom_eigen(spec, rule, 10);
  const double gap =
      kle::basis_optimality_gap(spec, rule, 10, dec.eigvecs.leftCols(10));
  CHECK(std::abs(gap) <= 1e-10);
}

TEST_CASE("fourier bases are suboptimal but non-negative in gap") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 200);
  for (Eigen::Index r : {5, 10, 20}) {
    const Eigen::MatrixXd basis = kle::fourier_w_orthonormal(rule, r);
    const double gap = kle::basis_optimality_gap(spec, rule, r, basis);
    CHECK(gap >= 0.0);
  }
}

TEST_CASE("trailing eigenvector of the constant kernel loses everything") {
  const KernelSpec spec = KernelSpec::constant(kUnit, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 30);
  const SpectralDecomposition full = kle::nystrom_eigen(spec, rule, 30);
  const double gap = kle::basis_optimality_gap(
      spec, rule, 1, full.eigvecs.rightCols(1));
  CHECK(gap == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("basis optimality gap over random W-orthonormal bases") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 0.25);
  const auto rule = kle::make_trapezoid(kUnit, 60);
  const SpectralDecomposition full = kle::nystrom_eigen(spec, rule, 60);
  const kle::KernelMatrix km = kle::kernel_matrix(spec, rule);
  int count = 0;
  for (Eigen::Index r : {1, 5, 10}) {
    for (int rep = 0; rep < 40; ++rep) {
      const Eigen::MatrixXd basis = kle::random_w_orthonormal(
          rule.weights(), r, 31337, static_cast<std::uint64_t>(count));
      const double gap = kle::basis_optimality_gap(full, km.entries, basis);
      CHECK(gap >= -1e-10 * full.lambdas[0]);
      ++count;
    }
  }
  CHECK(count >= 100);
}

TEST_CASE("basis optimality rejects a non-W-orthonormal basis") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 30);
  const Eigen::MatrixXd basis = kle_test::random_matrix(30, 3, 5);
  CHECK_THROWS_AS(kle::basis_optimality_gap(spec, rule, 3, basis),
                  kle::InvalidArgument);
}

TEST_CASE("w_orthonormalize produces a W-orthonormal basis") {
  const auto rule = kle::make_trapezoid(kUnit, 50);
  const Eigen::MatrixXd basis =
      kle::w_orthonormalize(rule.weights(), kle_test::random_matrix(50, 8, 71));
  const Eigen::MatrixXd gram =
      basis.transpose() * rule.weights().asDiagonal() * basis;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <=
        1e-12);

  Eigen::MatrixXd dependent(50, 2);
  dependent.col(0) = basis.col(0);
  dependent.col(1) = 2.0 * basis.col(0);
  CHECK_THROWS_AS(kle::w_orthonormalize(rule.weights(), dependent),
                  kle::NumericError);
}

TEST_CASE("grid refinement study tracks the reference spectrum") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const StudyReport report =
      kle::grid_refinement_study(spec, {2, 5}, {50, 100, 400}, 400);
  CHECK(report.name == "grid_refinement");
  CHECK(report.columns == std::vector<std::string>{"n", "k", "relative_error"});
  CHECK(report.rows.size() == 6);

  auto error_at = [&](double n, double k) {
    for (const auto& row : report.rows) {
      if (row[0] == n && row[1] == k) return row[2];
    }
    return -1.0;
  };
  // refinement shrinks the error; higher indices are harder
  CHECK(error_at(100, 2) < error_at(50, 2));
  CHECK(error_at(100, 5) < error_at(50, 5));
  CHECK(error_at(100, 5) > error_at(100, 2));
  CHECK(error_at(400, 2) == 0.0);
  CHECK(error_at(400, 5) == 0.0);

  CHECK_THROWS_AS(kle::grid_refinement_study(spec, {2}, {100}, 50),
                  kle::InvalidArgument);
  CHECK_THROWS_AS(kle::grid_refinement_study(spec, {0}, {100}, 200),
                  kle::InvalidArgument);
}

TEST_CASE("correlation study reproduces the kernel law") {
  const StudyReport report = kle::correlation_study(
      kUnit, 1.0, 0.25, {0.25, 0.5, 1.0}, {1.0 / 16, 1.0 / 4, 1.0});
  CHECK(report.name == "correlation");
  CHECK(report.rows.size() == 9);

  auto corr_at = [&](double ell, double y) {
    for (const auto& row : report.rows) {
      if (row[0] == ell && row[1] == y) return row[2];
    }
    return -1.0;
  };
  CHECK(corr_at(1.0, 0.25) == 1.0);
  CHECK(corr_at(1.0 / 16, 0.5) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(corr_at(1.0 / 16, 0.5) == doctest::Approx(0.0183156).epsilon(1e-4));
  // correlation at a fixed pair grows with ell
  CHECK(corr_at(1.0 / 16, 1.0) < corr_at(1.0 / 4, 1.0));
  CHECK(corr_at(1.0 / 4, 1.0) < corr_at(1.0, 1.0));

  CHECK_THROWS_AS(kle::correlation_study(kUnit, 1.0, 2.0, {0.5}, {1.0}),
                  kle::InvalidArgument);
}

TEST_CASE("report serialization") {
  StudyReport report;
  report.name = "demo";
  report.parameters = {{"alpha", "1"}, {"beta", "two"}};
  report.columns = {"x", "y"};
  report.rows = {{0.5, 1.0}, {0.25, -2.0}};
  report.pass = true;

  CHECK(kle::report_to_csv(report) == "x,y\n0.5,1\n0.25,-2\n");

  const nlohmann::json j = kle::report_to_json(report);
  CHECK(j["name"] == "demo");
  CHECK(j["parameters"]["alpha"] == "1");
  CHECK(j["pass"] == true);
  CHECK(j["row_count"] == 2);

  report.pass.reset();
  CHECK(kle::report_to_json(report)["pass"].is_null());
}

TEST_CASE("verification bundle passes for an admissible kernel") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 120);
  const auto reports = kle::run_verification(spec, rule, 321);
  CHECK(reports.size() == 5);
  CHECK(reports[0].name == "admissibility");
  CHECK(reports[1].name == "trace_identity");
  CHECK(reports[2].name == "mercer_diagonal");
  CHECK(reports[3].name == "ky_fan");
  CHECK(reports[4].name == "coefficient_stats");
  for (const auto& report : reports) {
    REQUIRE(report.pass.has_value());
    CHECK(*report.pass);
  }
}

TEST_CASE("verification bundle is deterministic") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 0.5);
  const auto rule = kle::make_trapezoid(kUnit, 60);
  const auto first = kle::run_verification(spec, rule, 9);
  const auto second = kle::run_verification(spec, rule, 9);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].rows == second[i].rows);
  }
}

TEST_CASE("verification stops at an inadmissible kernel") {
  const KernelSpec spec =
      KernelSpec::custom(kUnit, [](double, double) { return -1.0; });
  const auto rule = kle::make_trapezoid(kUnit, 20);
  const auto reports = kle::run_verification(spec, rule, 1);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].name == "admissibility");
  CHECK(!*reports[0].pass);
}
