#include "quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace kle {

Interval::Interval(double a_in, double b_in) : a(a_in), b(b_in) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("interval endpoints must be finite");
  }
  if (!(a < b)) {
    throw InvalidArgument("interval requires a < b, got [" +
                          std::to_string(a) + ", " + std::to_string(b) + "]");
  }
}

QuadratureRule::QuadratureRule(Interval interval, Eigen::VectorXd nodes,
                               Eigen::VectorXd weights)
    : interval_(interval), nodes_(std::move(nodes)),
      weights_(std::move(weights)) {
  const Eigen::Index n = nodes_.size();
  if (n < 1 || weights_.size() != n) {
    throw InvalidArgument("quadrature rule needs matching nodes/weights, n >= 1");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!interval_.contains(nodes_[k])) {
      throw InvalidArgument("quadrature node outside interval");
    }
    if (k > 0 && !(nodes_[k] > nodes_[k - 1])) {
      throw InvalidArgument("quadrature nodes must be strictly increasing");
    }
    if (!(weights_[k] > 0.0)) {
      throw InvalidArgument("quadrature weights must be positive");
    }
  }
  const double len = interval_.length();
  if (std::abs(weights_.sum() - len) > 1e-12 * len) {
    throw InvalidArgument("quadrature weights do not sum to the interval length");
  }
}

QuadratureRule make_trapezoid(const Interval& interval, Eigen::Index n) {
  if (n < 2) {
    throw InvalidArgument("trapezoid rule requires n >= 2 nodes");
  }
  const double h = interval.length() / static_cast<double>(n - 1);
  Eigen::VectorXd nodes(n);
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, h);
  for (Eigen::Index k = 0; k < n; ++k) {
    nodes[k] = interval.a + static_cast<double>(k) * h;
  }
  nodes[n - 1] = interval.b;
  weights[0] = h / 2.0;
  weights[n - 1] = h / 2.0;
  return QuadratureRule(interval, std::move(nodes), std::move(weights));
}

QuadratureRule make_gauss_legendre(const Interval& interval, Eigen::Index n) {
  if (n < 1) {
    throw InvalidArgument("Gauss-Legendre rule requires n >= 1 nodes");
  }
  Eigen::VectorXd ref_nodes(n);
  Eigen::VectorXd ref_weights(n);

  // Newton iteration on P_n with the usual Chebyshev-like initial guesses;
  // roots come in +/- pairs, so only the lower half is computed.
  const Eigen::Index half = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  for (Eigen::Index i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (dn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Three-term recurrence for P_n(z) and P_{n-1}(z).
      double p = 1.0;
      double pm1 = 0.0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const double pm2 = pm1;
        pm1 = p;
        const double dj = static_cast<double>(j);
        p = ((2.0 * dj - 1.0) * z * pm1 - (dj - 1.0) * pm2) / dj;
      }
      dp = dn * (z * p - pm1) / (z * z - 1.0);
      const double step = p / dp;
      z -= step;
      if (std::abs(step) <= 1e-14) break;
    }
    ref_nodes[i] = -z;
    ref_nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    ref_weights[i] = w;
    ref_weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) ref_nodes[n / 2] = 0.0;

  const double mid = 0.5 * (interval.a + interval.b);
  const double scale = 0.5 * interval.length();
  Eigen::VectorXd nodes = (ref_nodes.array() * scale + mid).matrix();
  Eigen::VectorXd weights = ref_weights * scale;
  return QuadratureRule(interval, std::move(nodes), std::move(weights));
}

double integrate(const QuadratureRule& rule,
                 const std::function<double(double)>& f) {
  const Eigen::VectorXd& x = rule.nodes();
  const Eigen::VectorXd& w = rule.weights();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double fx = f(x[k]);
    if (!std::isfinite(fx)) {
      throw NumericError("integrand is not finite at node x=" +
                         std::to_string(x[k]));
    }
    acc += w[k] * fx;
  }
  return acc;
}

}  // namespace kle
