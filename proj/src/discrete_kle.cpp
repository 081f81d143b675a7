#include "discrete_kle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "nystrom.hpp"

namespace kle {

VectorKLE vector_kle(const Eigen::MatrixXd& covariance,
                     const Eigen::VectorXd& mean) {
  if (covariance.rows() != mean.size()) {
    throw InvalidArgument("covariance and mean dimensions do not match");
  }
  EigenDecomposition dec = solve_symmetric_eigen(covariance);
  const double lead = std::max(dec.values[0], 0.0);
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    if (dec.values[i] < -1e-10 * lead) {
      throw InvalidArgument("covariance matrix is indefinite (eigenvalue " +
                            std::to_string(dec.values[i]) + ")");
    }
    if (dec.values[i] < 0.0) dec.values[i] = 0.0;
  }
  return VectorKLE{mean, std::move(dec.values), std::move(dec.vectors)};
}

Eigen::VectorXd project(const VectorKLE& kle, const Eigen::VectorXd& z,
                        Eigen::Index r) {
  if (z.size() != kle.mean.size()) {
    throw InvalidArgument("vector dimension does not match the expansion");
  }
  if (r < 0 || r > kle.basis.cols()) {
    throw InvalidArgument("projection rank out of range");
  }
  return kle.basis.leftCols(r).transpose() * (z - kle.mean);
}

Eigen::VectorXd reconstruct(const VectorKLE& kle,
                            const Eigen::VectorXd& coeffs) {
  if (coeffs.size() > kle.basis.cols()) {
    throw InvalidArgument("more coefficients than basis vectors");
  }
  return kle.mean + kle.basis.leftCols(coeffs.size()) * coeffs;
}

double truncation_error(const Eigen::VectorXd& lambdas, Eigen::Index r) {
  if (r < 0 || r > lambdas.size()) {
    throw InvalidArgument("truncation rank out of range");
  }
  return lambdas.tail(lambdas.size() - r).sum();
}

double variance_ratio(const Eigen::VectorXd& lambdas, double total_variance,
                      Eigen::Index r) {
  if (!(total_variance > 0.0)) {
    throw InvalidArgument("total variance must be positive");
  }
  if (r < 0 || r > lambdas.size()) {
    throw InvalidArgument("rank out of range");
  }
  const double captured = lambdas.head(r).sum();
  if (captured > total_variance * (1.0 + 1e-10)) {
    throw InvalidArgument("captured variance exceeds the stated total");
  }
  return std::clamp(captured / total_variance, 0.0, 1.0);
}

Eigen::Index select_rank(const Eigen::VectorXd& lambdas, double total_variance,
                         double threshold) {
  if (!(total_variance > 0.0)) {
    throw InvalidArgument("total variance must be positive");
  }
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw InvalidArgument("threshold must lie in (0, 1]");
  }
  double captured = 0.0;
  for (Eigen::Index r = 0; r < lambdas.size(); ++r) {
    captured += lambdas[r];
    if (captured / total_variance >= threshold) return r + 1;
  }
  throw InsufficientSpectrum(
      "available eigenvalues capture " +
      std::to_string(captured / total_variance) +
      " of the variance, below the requested " + std::to_string(threshold));
}

double ky_fan_gap(const Eigen::MatrixXd& covariance, const Eigen::MatrixXd& q) {
  if (q.rows() != covariance.rows() || q.cols() < 1 ||
      q.cols() > q.rows()) {
    throw InvalidArgument("Q must be n x r with 1 <= r <= n");
  }
  const Eigen::Index r = q.cols();
  const Eigen::MatrixXd gram = q.transpose() * q;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw InvalidArgument("Q columns are not orthonormal");
  }
  EigenDecomposition dec = solve_symmetric_eigen(covariance);
  const double captured = (q.transpose() * covariance * q).trace();
  return dec.values.head(r).sum() - captured;
}

MeanCovariance empirical_covariance(const SampleEnsemble& ensemble) {
  const Eigen::Index count = ensemble.samples.rows();
  if (count < 2) {
    throw InvalidArgument("empirical covariance requires at least 2 samples");
  }
  if (!ensemble.samples.allFinite()) {
    throw InvalidArgument("ensemble contains non-finite entries");
  }
  const Eigen::VectorXd mean = ensemble.samples.colwise().mean();
  const Eigen::MatrixXd centered =
      ensemble.samples.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) /
                        static_cast<double>(count - 1);
  cov = ((cov + cov.transpose()) * 0.5).eval();
  return MeanCovariance{mean, std::move(cov)};
}

}  // namespace kle
