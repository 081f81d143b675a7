#pragma once

#include <Eigen/Core>
#include <functional>

namespace kle {

/// Closed interval [a, b] with a < b.
struct Interval {
  Interval(double a, double b);

  double length() const { return b - a; }
  bool contains(double x) const { return x >= a && x <= b; }

  double a;
  double b;
};

/// Nodes and positive weights defining the discrete measure
///   integral f dx ~ sum_k w_k f(x_k)
/// on an interval. Nodes are strictly increasing and contained in [a, b];
/// the weights reproduce the interval length exactly on constants.
class QuadratureRule {
 public:
  QuadratureRule(Interval interval, Eigen::VectorXd nodes,
                 Eigen::VectorXd weights);

  const Interval& interval() const { return interval_; }
  Eigen::Index size() const { return nodes_.size(); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  Interval interval_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

/// Composite trapezoid rule with n >= 2 equispaced nodes including both
/// endpoints; interior weights h, endpoint weights h/2, h = (b-a)/(n-1).
QuadratureRule make_trapezoid(const Interval& interval, Eigen::Index n);

/// Gauss-Legendre rule with n >= 1 points mapped affinely from [-1, 1];
/// exact for polynomials of degree <= 2n-1.
QuadratureRule make_gauss_legendre(const Interval& interval, Eigen::Index n);

/// Weighted node sum sum_k w_k f(x_k). Throws NumericError if any f(x_k)
/// is non-finite.
double integrate(const QuadratureRule& rule,
                 const std::function<double(double)>& f);

}  // namespace kle
