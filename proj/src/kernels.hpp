#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "json.hpp"
#include "quadrature.hpp"

namespace kle {

enum class KernelKind { Exponential, Constant, BrownianMin, Custom };

/// Parametrized covariance function c(x, y) on a fixed domain. Built-in
/// variants:
///   Exponential  c(x,y) = sigma^2 exp(-|x-y|/ell)
///   Constant     c(x,y) = sigma^2
///   BrownianMin  c(x,y) = min(x,y)        (requires a >= 0)
///   Custom       user-supplied symmetric continuous function
/// BrownianMin exists as a test fixture: its eigenpairs are known in closed
/// form, which makes it the oracle for validating the discretized
/// eigenproblem.
class KernelSpec {
 public:
  static KernelSpec exponential(const Interval& domain, double sigma,
                                double ell);
  static KernelSpec constant(const Interval& domain, double sigma);
  static KernelSpec brownian_min(const Interval& domain = Interval(0.0, 1.0));
  static KernelSpec custom(const Interval& domain,
                           std::function<double(double, double)> fn);

  KernelKind kind() const { return kind_; }
  const Interval& domain() const { return domain_; }
  double sigma() const { return sigma_; }
  double ell() const { return ell_; }

  /// c(x, y) without the domain check; callers must hold x, y in domain().
  double value(double x, double y) const;

 private:
  KernelSpec(KernelKind kind, const Interval& domain)
      : kind_(kind), domain_(domain) {}

  KernelKind kind_;
  Interval domain_;
  double sigma_ = 0.0;
  double ell_ = 0.0;
  std::function<double(double, double)> fn_;
};

/// c(x, y) with both arguments checked against the kernel domain.
double eval_kernel(const KernelSpec& spec, double x, double y);

/// Gram matrix C_kl = c(x_k, x_l) on the rule nodes; exactly symmetric by
/// construction (upper triangle mirrored).
struct KernelMatrix {
  QuadratureRule rule;
  Eigen::MatrixXd entries;
};

KernelMatrix kernel_matrix(const KernelSpec& spec, const QuadratureRule& rule);

/// Discrete positivity check: minimum eigenvalue of W^{1/2} C W^{1/2};
/// passes iff it is >= -tol.
struct AdmissibilityResult {
  bool pass;
  double min_eigenvalue;
};

AdmissibilityResult admissibility_check(const KernelSpec& spec,
                                        const QuadratureRule& rule,
                                        double tol);

/// Parses {"kernel": "exponential", "sigma": ..., "ell": ...} and friends.
/// Unknown kernel names or keys are rejected.
KernelSpec kernel_from_json(const nlohmann::json& j, const Interval& domain);

/// Inverse of kernel_from_json for the built-in variants; Custom serializes
/// as its name only.
nlohmann::json kernel_to_json(const KernelSpec& spec);

}  // namespace kle
