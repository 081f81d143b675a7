#include "kernels.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>
#include <utility>

#include "errors.hpp"
#include "parallel.hpp"

namespace kle {

KernelSpec KernelSpec::exponential(const Interval& domain, double sigma,
                                   double ell) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("exponential kernel requires sigma > 0");
  }
  if (!(ell > 0.0) || !std::isfinite(ell)) {
    throw InvalidArgument("exponential kernel requires ell > 0");
  }
  KernelSpec spec(KernelKind::Exponential, domain);
  spec.sigma_ = sigma;
  spec.ell_ = ell;
  return spec;
}

KernelSpec KernelSpec::constant(const Interval& domain, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("constant kernel requires sigma > 0");
  }
  KernelSpec spec(KernelKind::Constant, domain);
  spec.sigma_ = sigma;
  return spec;
}

KernelSpec KernelSpec::brownian_min(const Interval& domain) {
  if (domain.a < 0.0) {
    throw InvalidArgument("brownian_min kernel requires a >= 0");
  }
  return KernelSpec(KernelKind::BrownianMin, domain);
}

KernelSpec KernelSpec::custom(const Interval& domain,
                              std::function<double(double, double)> fn) {
  if (!fn) {
    throw InvalidArgument("custom kernel requires an evaluator");
  }
  KernelSpec spec(KernelKind::Custom, domain);
  spec.fn_ = std::move(fn);
  return spec;
}

double KernelSpec::value(double x, double y) const {
  switch (kind_) {
    case KernelKind::Exponential:
      return sigma_ * sigma_ * std::exp(-std::abs(x - y) / ell_);
    case KernelKind::Constant:
      return sigma_ * sigma_;
    case KernelKind::BrownianMin:
      return std::min(x, y);
    case KernelKind::Custom:
      return fn_(x, y);
  }
  return 0.0;  // unreachable
}

double eval_kernel(const KernelSpec& spec, double x, double y) {
  if (!spec.domain().contains(x) || !spec.domain().contains(y)) {
    throw InvalidArgument("kernel evaluation point outside the domain");
  }
  return spec.value(x, y);
}

KernelMatrix kernel_matrix(const KernelSpec& spec, const QuadratureRule& rule) {
  const Interval& dom = spec.domain();
  if (!dom.contains(rule.interval().a) || !dom.contains(rule.interval().b)) {
    throw InvalidArgument("quadrature interval is not contained in the kernel domain");
  }
  const Eigen::Index n = rule.size();
  const Eigen::VectorXd& x = rule.nodes();
  Eigen::MatrixXd entries(n, n);
  parallel_for(0, n, [&](std::int64_t lo, std::int64_t hi) {
    for (Eigen::Index k = lo; k < hi; ++k) {
      for (Eigen::Index l = k; l < n; ++l) {
        entries(k, l) = spec.value(x[k], x[l]);
      }
    }
  });
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < k; ++l) {
      entries(k, l) = entries(l, k);
    }
  }
  return KernelMatrix{rule, std::move(entries)};
}

AdmissibilityResult admissibility_check(const KernelSpec& spec,
                                        const QuadratureRule& rule,
                                        double tol) {
  if (!(tol >= 0.0)) {
    throw InvalidArgument("admissibility tolerance must be >= 0");
  }
  const KernelMatrix km = kernel_matrix(spec, rule);
  const Eigen::VectorXd d = rule.weights().cwiseSqrt();
  const Eigen::MatrixXd scaled =
      d.asDiagonal() * km.entries * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      scaled, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigenvalue solve failed in admissibility check");
  }
  const double min_eig = solver.eigenvalues().minCoeff();
  return AdmissibilityResult{min_eig >= -tol, min_eig};
}

KernelSpec kernel_from_json(const nlohmann::json& j, const Interval& domain) {
  if (!j.is_object() || !j.contains("kernel") || !j["kernel"].is_string()) {
    throw InvalidArgument("kernel spec must be an object with a \"kernel\" name");
  }
  const std::string name = j["kernel"].get<std::string>();

  auto require_keys = [&](std::set<std::string> allowed) {
    allowed.insert("kernel");
    for (const auto& item : j.items()) {
      if (allowed.find(item.key()) == allowed.end()) {
        throw InvalidArgument("unknown key \"" + item.key() +
                              "\" in kernel spec \"" + name + "\"");
      }
    }
  };
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw InvalidArgument("kernel spec \"" + name +
                            "\" requires numeric \"" + key + "\"");
    }
    return j[key].get<double>();
  };

  if (name == "exponential") {
    require_keys({"sigma", "ell"});
    return KernelSpec::exponential(domain, number("sigma"), number("ell"));
  }
  if (name == "constant") {
    require_keys({"sigma"});
    return KernelSpec::constant(domain, number("sigma"));
  }
  if (name == "brownian_min") {
    require_keys({});
    return KernelSpec::brownian_min(domain);
  }
  throw InvalidArgument("unknown kernel \"" + name + "\"");
}

nlohmann::json kernel_to_json(const KernelSpec& spec) {
  switch (spec.kind()) {
    case KernelKind::Exponential:
      return {{"kernel", "exponential"},
              {"sigma", spec.sigma()},
              {"ell", spec.ell()}};
    case KernelKind::Constant:
      return {{"kernel", "constant"}, {"sigma", spec.sigma()}};
    case KernelKind::BrownianMin:
      return {{"kernel", "brownian_min"}};
    case KernelKind::Custom:
      return {{"kernel", "custom"}};
  }
  return nullptr;  // unreachable
}

}  // namespace kle
