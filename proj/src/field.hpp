#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "nystrom.hpp"

namespace kle {

enum class MeanKind { Zero, Grid, Custom };

/// Mean function of the field: identically zero, piecewise-linear through
/// nodal values, or an arbitrary continuous function.
class MeanFunction {
 public:
  static MeanFunction zero();
  static MeanFunction grid(Eigen::VectorXd nodes, Eigen::VectorXd values);
  static MeanFunction custom(std::function<double(double)> fn);

  MeanKind kind() const { return kind_; }
  double operator()(double x) const;

 private:
  explicit MeanFunction(MeanKind kind) : kind_(kind) {}

  MeanKind kind_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd values_;
  std::function<double(double)> fn_;
};

/// How many modes to keep: a fixed rank, or the smallest rank whose captured
/// variance fraction reaches a threshold.
class RankSelection {
 public:
  static RankSelection fixed(Eigen::Index rank);
  static RankSelection threshold(double t);

  bool is_fixed() const { return fixed_; }
  Eigen::Index rank() const { return rank_; }
  double threshold_value() const { return threshold_; }

 private:
  RankSelection() = default;

  bool fixed_ = false;
  Eigen::Index rank_ = 0;
  double threshold_ = 0.0;
};

/// Rank-r field representation Z(x) ~ mean(x) + sum_i sqrt(lambda_i) xi_i
/// v_i(x), ready for sampling and off-grid evaluation. rho records the
/// captured fraction of the total variance integral c(x,x) dx.
struct TruncatedKLE {
  SpectralDecomposition dec;
  MeanFunction mean;
  double rho;

  Eigen::Index rank() const { return dec.modes(); }
};

TruncatedKLE build_truncated_kle(const KernelSpec& spec,
                                 const QuadratureRule& rule,
                                 MeanFunction mean,
                                 const RankSelection& selection);

/// Seeded batch of realizations, stored as their standard-normal coefficient
/// rows. Draws for sample k come from an independent stream derived from
/// (seed, k), so the batch is reproducible and order-independent.
struct FieldEnsemble {
  TruncatedKLE kle;
  Eigen::MatrixXd coeffs;  // N x r
  std::uint64_t seed;

  Eigen::Index count() const { return coeffs.rows(); }
};

FieldEnsemble sample(const TruncatedKLE& kle, Eigen::Index count,
                     std::uint64_t seed);

/// Test hook: ensemble with caller-supplied coefficients instead of random
/// draws (one row per realization, r columns).
FieldEnsemble sample_with_coefficients(const TruncatedKLE& kle,
                                       Eigen::MatrixXd coeffs);

/// Realization value mean(x) + sum_i sqrt(lambda_i) xi_i v_i(x), with the
/// eigenfunctions extended off-grid.
double evaluate(const FieldEnsemble& ensemble, Eigen::Index sample_index,
                double x);

/// Nodal values of one realization using the leading `rank` modes
/// (rank < 0 means all retained modes).
Eigen::VectorXd evaluate_on_nodes(const FieldEnsemble& ensemble,
                                  Eigen::Index sample_index,
                                  Eigen::Index rank = -1);

/// Var[Z^[r]](x) = sum_{i <= r} lambda_i v_i(x)^2.
double pointwise_variance(const TruncatedKLE& kle, double x);

/// (sum_{i <= r} lambda_i) / (b - a).
double average_variance(const TruncatedKLE& kle);

/// exp(Z(x)) for log-normal fields; throws NumericError when the exponent
/// would overflow.
double log_normal_field(const FieldEnsemble& ensemble,
                        Eigen::Index sample_index, double x);

}  // namespace kle
