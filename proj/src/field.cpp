#include "field.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "discrete_kle.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace kle {

MeanFunction MeanFunction::zero() { return MeanFunction(MeanKind::Zero); }

MeanFunction MeanFunction::grid(Eigen::VectorXd nodes,
                                Eigen::VectorXd values) {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw InvalidArgument("grid mean needs matching nodes/values, n >= 2");
  }
  for (Eigen::Index k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1])) {
      throw InvalidArgument("grid mean nodes must be strictly increasing");
    }
  }
  if (!values.allFinite()) {
    throw InvalidArgument("grid mean values must be finite");
  }
  MeanFunction mean(MeanKind::Grid);
  mean.nodes_ = std::move(nodes);
  mean.values_ = std::move(values);
  return mean;
}

MeanFunction MeanFunction::custom(std::function<double(double)> fn) {
  if (!fn) {
    throw InvalidArgument("custom mean requires a function");
  }
  MeanFunction mean(MeanKind::Custom);
  mean.fn_ = std::move(fn);
  return mean;
}

double MeanFunction::operator()(double x) const {
  switch (kind_) {
    case MeanKind::Zero:
      return 0.0;
    case MeanKind::Custom:
      return fn_(x);
    case MeanKind::Grid: {
      if (x < nodes_[0] || x > nodes_[nodes_.size() - 1]) {
        throw InvalidArgument("mean evaluation point outside the grid");
      }
      const double* begin = nodes_.data();
      const double* end = begin + nodes_.size();
      const double* upper = std::upper_bound(begin, end, x);
      Eigen::Index hi = std::min<Eigen::Index>(upper - begin,
                                               nodes_.size() - 1);
      if (hi == 0) hi = 1;
      const Eigen::Index lo = hi - 1;
      const double t = (x - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
      return values_[lo] + t * (values_[hi] - values_[lo]);
    }
  }
  return 0.0;  // unreachable
}

RankSelection RankSelection::fixed(Eigen::Index rank) {
  if (rank < 0) {
    throw InvalidArgument("rank must be >= 0");
  }
  RankSelection sel;
  sel.fixed_ = true;
  sel.rank_ = rank;
  return sel;
}

RankSelection RankSelection::threshold(double t) {
  if (!(t > 0.0) || t > 1.0) {
    throw InvalidArgument("variance threshold must lie in (0, 1]");
  }
  RankSelection sel;
  sel.threshold_ = t;
  return sel;
}

TruncatedKLE build_truncated_kle(const KernelSpec& spec,
                                 const QuadratureRule& rule,
                                 MeanFunction mean,
                                 const RankSelection& selection) {
  const Eigen::Index n = rule.size();
  const double total =
      integrate(rule, [&](double x) { return spec.value(x, x); });
  if (!(total > 0.0)) {
    throw InvalidArgument("kernel has nonpositive total variance");
  }

  if (selection.is_fixed()) {
    const Eigen::Index r = selection.rank();
    if (r > n) {
      throw InvalidArgument("requested rank exceeds the grid size");
    }
    if (r == 0) {
      SpectralDecomposition empty{rule, spec, Eigen::VectorXd(0),
                                  Eigen::MatrixXd(n, 0)};
      return TruncatedKLE{std::move(empty), std::move(mean), 0.0};
    }
    SpectralDecomposition dec = nystrom_eigen(spec, rule, r);
    if (!(dec.lambdas[r - 1] > 0.0)) {
      throw DegenerateMode("rank " + std::to_string(r) +
                           " reaches a zero eigenvalue; use a smaller rank");
    }
    const double rho = std::clamp(dec.lambdas.sum() / total, 0.0, 1.0);
    return TruncatedKLE{std::move(dec), std::move(mean), rho};
  }

  SpectralDecomposition full = nystrom_eigen(spec, rule, n);
  Eigen::Index r = 0;
  try {
    r = select_rank(full.lambdas, total, selection.threshold_value());
  } catch (const InsufficientSpectrum&) {
    throw InsufficientSpectrum(
        "variance threshold " + std::to_string(selection.threshold_value()) +
        " is unreachable with n = " + std::to_string(n) +
        " quadrature nodes; increase n");
  }
  const double rho =
      std::clamp(full.lambdas.head(r).sum() / total, 0.0, 1.0);
  return TruncatedKLE{truncate(full, r), std::move(mean), rho};
}

FieldEnsemble sample(const TruncatedKLE& kle, Eigen::Index count,
                     std::uint64_t seed) {
  if (count < 1) {
    throw InvalidArgument("sample count must be >= 1");
  }
  const Eigen::Index r = kle.rank();
  Eigen::MatrixXd coeffs(count, r);
  parallel_for(0, count, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t k = lo; k < hi; ++k) {
      GaussianStream stream(seed, static_cast<std::uint64_t>(k));
      for (Eigen::Index i = 0; i < r; ++i) {
        coeffs(k, i) = stream.next_normal();
      }
    }
  });
  return FieldEnsemble{kle, std::move(coeffs), seed};
}

FieldEnsemble sample_with_coefficients(const TruncatedKLE& kle,
                                       Eigen::MatrixXd coeffs) {
  if (coeffs.rows() < 1 || coeffs.cols() != kle.rank()) {
    throw InvalidArgument("coefficient matrix must be N x rank with N >= 1");
  }
  if (!coeffs.allFinite()) {
    throw InvalidArgument("coefficients must be finite");
  }
  return FieldEnsemble{kle, std::move(coeffs), 0};
}

namespace {

void check_sample_index(const FieldEnsemble& ensemble, Eigen::Index index) {
  if (index < 0 || index >= ensemble.count()) {
    throw InvalidArgument("sample index out of range");
  }
}

}  // namespace

double evaluate(const FieldEnsemble& ensemble, Eigen::Index sample_index,
                double x) {
  check_sample_index(ensemble, sample_index);
  const TruncatedKLE& kle = ensemble.kle;
  if (!kle.dec.rule.interval().contains(x)) {
    throw InvalidArgument("evaluation point outside the interval");
  }
  double acc = kle.mean(x);
  if (kle.rank() > 0) {
    const Eigen::VectorXd modes = nystrom_extend_all(kle.dec, x);
    const Eigen::VectorXd scale = kle.dec.lambdas.cwiseSqrt();
    acc += (scale.cwiseProduct(modes))
               .dot(ensemble.coeffs.row(sample_index));
  }
  return acc;
}

Eigen::VectorXd evaluate_on_nodes(const FieldEnsemble& ensemble,
                                  Eigen::Index sample_index,
                                  Eigen::Index rank) {
  check_sample_index(ensemble, sample_index);
  const TruncatedKLE& kle = ensemble.kle;
  if (rank < 0) rank = kle.rank();
  if (rank > kle.rank()) {
    throw InvalidArgument("requested rank exceeds the retained modes");
  }
  const Eigen::VectorXd& nodes = kle.dec.rule.nodes();
  Eigen::VectorXd values(nodes.size());
  for (Eigen::Index k = 0; k < nodes.size(); ++k) {
    values[k] = kle.mean(nodes[k]);
  }
  if (rank > 0) {
    const Eigen::VectorXd weighted =
        kle.dec.lambdas.head(rank).cwiseSqrt().cwiseProduct(
            ensemble.coeffs.row(sample_index).head(rank).transpose());
    values += kle.dec.eigvecs.leftCols(rank) * weighted;
  }
  return values;
}

double pointwise_variance(const TruncatedKLE& kle, double x) {
  if (!kle.dec.rule.interval().contains(x)) {
    throw InvalidArgument("evaluation point outside the interval");
  }
  if (kle.rank() == 0) return 0.0;
  const Eigen::VectorXd modes = nystrom_extend_all(kle.dec, x);
  return kle.dec.lambdas.dot(modes.cwiseAbs2());
}

double average_variance(const TruncatedKLE& kle) {
  return kle.dec.lambdas.sum() / kle.dec.rule.interval().length();
}

double log_normal_field(const FieldEnsemble& ensemble,
                        Eigen::Index sample_index, double x) {
  const double exponent = evaluate(ensemble, sample_index, x);
  if (exponent > 700.0) {
    throw NumericError("log-normal field overflows at x=" +
                       std::to_string(x) + ", sample " +
                       std::to_string(sample_index) + " (exponent " +
                       std::to_string(exponent) + ")");
  }
  return std::exp(exponent);
}

}  // namespace kle
