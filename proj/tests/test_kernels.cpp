#include <cmath>

#include "doctest.h"
#include "errors.hpp"
#include "kernels.hpp"
#include "rng.hpp"

using kle::Interval;
using kle::KernelSpec;

namespace {

const Interval kUnit(0.0, 1.0);

}  // namespace

TEST_CASE("exponential kernel evaluation") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  CHECK(kle::eval_kernel(spec, 0.25, 0.25) == 1.0);
  CHECK(kle::eval_kernel(spec, 0.25, 1.0) ==
        doctest::Approx(std::exp(-0.75)).epsilon(1e-15));
  CHECK(kle::eval_kernel(spec, 0.25, 1.0) ==
        doctest::Approx(0.47236655274101469).epsilon(1e-15));
  // symmetric in its arguments
  CHECK(kle::eval_kernel(spec, 0.1, 0.9) == kle::eval_kernel(spec, 0.9, 0.1));
}

TEST_CASE("brownian-min kernel evaluation") {
  const KernelSpec spec = KernelSpec::brownian_min();
  CHECK(kle::eval_kernel(spec, 0.3, 0.7) == 0.3);
  CHECK(kle::eval_kernel(spec, 0.7, 0.3) == 0.3);
}

TEST_CASE("kernel evaluation outside the domain fails") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  CHECK_THROWS_AS(kle::eval_kernel(spec, -0.1, 0.5), kle::InvalidArgument);
  CHECK_THROWS_AS(kle::eval_kernel(spec, 0.5, 1.1), kle::InvalidArgument);
}

TEST_CASE("kernel parameter validation") {
  CHECK_THROWS_AS(KernelSpec::exponential(kUnit, 0.0, 1.0),
                  kle::InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::exponential(kUnit, 1.0, -2.0),
                  kle::InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::constant(kUnit, -1.0), kle::InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::brownian_min(Interval(-1.0, 1.0)),
                  kle::InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::custom(kUnit, nullptr), kle::InvalidArgument);
}

TEST_CASE("kernel matrix for the constant kernel is all ones") {
  const KernelSpec spec = KernelSpec::constant(kUnit, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 3);
  const kle::KernelMatrix km = kle::kernel_matrix(spec, rule);
  CHECK(km.entries.rows() == 3);
  CHECK((km.entries.array() == 1.0).all());
}

TEST_CASE("kernel matrix of the 2-node exponential") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(kUnit, 2);
  const kle::KernelMatrix km = kle::kernel_matrix(spec, rule);
  CHECK(km.entries(0, 0) == 1.0);
  CHECK(km.entries(1, 1) == 1.0);
  CHECK(km.entries(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(km.entries(1, 0) == km.entries(0, 1));
}

TEST_CASE("kernel matrix is exactly symmetric for asymmetric rounding") {
  // A custom kernel whose naive evaluation is not bit-symmetric.
  const KernelSpec spec = KernelSpec::custom(kUnit, [](double x, double y) {
    return std::exp(x * 0.3 + y * 0.7) + std::exp(y * 0.3 + x * 0.7);
  });
  const auto rule = kle::make_trapezoid(kUnit, 17);
  const kle::KernelMatrix km = kle::kernel_matrix(spec, rule);
  CHECK((km.entries - km.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel matrix rejects a rule outside the kernel domain") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 1.0);
  const auto rule = kle::make_trapezoid(Interval(0.0, 2.0), 5);
  CHECK_THROWS_AS(kle::kernel_matrix(spec, rule), kle::InvalidArgument);
}

TEST_CASE("admissibility of the built-in kernels") {
  const auto rule = kle::make_trapezoid(kUnit, 50);

  const auto exp_result = kle::admissibility_check(
      KernelSpec::exponential(kUnit, 1.0, 1.0), rule, 1e-10);
  CHECK(exp_result.pass);
  CHECK(exp_result.min_eigenvalue >= -1e-10);

  const auto rule20 = kle::make_trapezoid(kUnit, 20);
  const auto const_result =
      kle::admissibility_check(KernelSpec::constant(kUnit, 1.0), rule20, 1e-10);
  CHECK(const_result.pass);
  CHECK(std::abs(const_result.min_eigenvalue) <= 1e-12);
}

TEST_CASE("constant negative kernel fails admissibility") {
  const KernelSpec spec =
      KernelSpec::custom(kUnit, [](double, double) { return -1.0; });
  const auto rule = kle::make_trapezoid(kUnit, 10);
  const auto result = kle::admissibility_check(spec, rule, 1e-10);
  CHECK(!result.pass);
  CHECK(result.min_eigenvalue ==
        doctest::Approx(-kUnit.length()).epsilon(1e-12));
}

TEST_CASE("admissibility tolerance must be non-negative") {
  const auto rule = kle::make_trapezoid(kUnit, 10);
  CHECK_THROWS_AS(kle::admissibility_check(KernelSpec::constant(kUnit, 1.0),
                                           rule, -1.0),
                  kle::InvalidArgument);
}

TEST_CASE("cauchy-schwarz bound on sampled pairs") {
  const KernelSpec kernels[] = {
      KernelSpec::exponential(kUnit, 1.3, 0.25),
      KernelSpec::constant(kUnit, 2.0),
      KernelSpec::brownian_min(),
  };
  kle::GaussianStream stream(2024, 0);
  for (const KernelSpec& spec : kernels) {
    for (int i = 0; i < 200; ++i) {
      const double x = stream.next_uniform();
      const double y = stream.next_uniform();
      const double bound = std::sqrt(spec.value(x, x) * spec.value(y, y));
      CHECK(std::abs(spec.value(x, y)) <= bound + 1e-12);
    }
  }
}

TEST_CASE("exponential kernel decays with distance") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, 0.5);
  const double x0 = 0.25;
  double previous = spec.value(x0, x0);
  for (double y = 0.3; y <= 1.0; y += 0.05) {
    const double value = spec.value(x0, y);
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("correlation grows with the correlation length") {
  const double x = 0.25;
  const double y = 1.0;
  double previous = 0.0;
  for (double ell : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0}) {
    const KernelSpec spec = KernelSpec::exponential(kUnit, 1.0, ell);
    const double corr = spec.value(x, y);
    CHECK(corr > previous);
    previous = corr;
  }
}

TEST_CASE("kernel specs parse from JSON") {
  const auto exp_spec = kle::kernel_from_json(
      nlohmann::json{{"kernel", "exponential"}, {"sigma", 1.0}, {"ell", 0.0625}},
      kUnit);
  CHECK(exp_spec.kind() == kle::KernelKind::Exponential);
  CHECK(exp_spec.sigma() == 1.0);
  CHECK(exp_spec.ell() == 0.0625);

  const auto const_spec = kle::kernel_from_json(
      nlohmann::json{{"kernel", "constant"}, {"sigma", 2.0}}, kUnit);
  CHECK(const_spec.kind() == kle::KernelKind::Constant);

  const auto bm_spec =
      kle::kernel_from_json(nlohmann::json{{"kernel", "brownian_min"}}, kUnit);
  CHECK(bm_spec.kind() == kle::KernelKind::BrownianMin);
}

TEST_CASE("kernel JSON rejects malformed specs") {
  CHECK_THROWS_AS(
      kle::kernel_from_json(nlohmann::json{{"kernel", "matern"}}, kUnit),
      kle::InvalidArgument);
  CHECK_THROWS_AS(kle::kernel_from_json(
                      nlohmann::json{{"kernel", "exponential"}, {"sigma", 1.0}},
                      kUnit),
                  kle::InvalidArgument);
  CHECK_THROWS_AS(
      kle::kernel_from_json(nlohmann::json{{"kernel", "constant"},
                                           {"sigma", 1.0},
                                           {"extra", 1.0}},
                            kUnit),
      kle::InvalidArgument);
  CHECK_THROWS_AS(kle::kernel_from_json(nlohmann::json::array(), kUnit),
                  kle::InvalidArgument);
}

TEST_CASE("kernel JSON round trip") {
  const KernelSpec spec = KernelSpec::exponential(kUnit, 1.5, 0.25);
  const auto parsed = kle::kernel_from_json(kle::kernel_to_json(spec), kUnit);
  CHECK(parsed.kind() == spec.kind());
  CHECK(parsed.sigma() == spec.sigma());
  CHECK(parsed.ell() == spec.ell());
}
