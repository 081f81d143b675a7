#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace kle {

/// Spectral representation of a random vector: mean, descending eigenvalues
/// and orthonormal eigenvectors of its covariance matrix.
struct VectorKLE {
  Eigen::VectorXd mean;
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd basis;  // n x n, columns orthonormal
};

/// Decomposes a symmetric positive semidefinite covariance matrix. Negative
/// eigenvalues within 1e-10 * lambda_1 of zero are clipped; an indefinite
/// matrix throws InvalidArgument.
VectorKLE vector_kle(const Eigen::MatrixXd& covariance,
                     const Eigen::VectorXd& mean);

/// Leading-r expansion coefficients z_i = <z - mean, v_i>.
Eigen::VectorXd project(const VectorKLE& kle, const Eigen::VectorXd& z,
                        Eigen::Index r);

/// mean + sum_i coeffs_i v_i for however many coefficients are given.
Eigen::VectorXd reconstruct(const VectorKLE& kle,
                            const Eigen::VectorXd& coeffs);

/// Mean-square truncation error sum_{i > r} lambda_i.
double truncation_error(const Eigen::VectorXd& lambdas, Eigen::Index r);

/// Captured-variance fraction rho(r) = (sum_{i <= r} lambda_i) / total,
/// clamped to [0, 1].
double variance_ratio(const Eigen::VectorXd& lambdas, double total_variance,
                      Eigen::Index r);

/// Smallest r with rho(r) >= threshold; throws InsufficientSpectrum when the
/// provided eigenvalues cannot reach it.
Eigen::Index select_rank(const Eigen::VectorXd& lambdas, double total_variance,
                         double threshold);

/// Ky Fan gap sum_{i <= r} lambda_i - trace(Q' C Q) for an n x r matrix Q
/// with orthonormal columns; non-negative up to roundoff for symmetric PSD C.
double ky_fan_gap(const Eigen::MatrixXd& covariance, const Eigen::MatrixXd& q);

/// Batch of realizations, one per row.
struct SampleEnsemble {
  Eigen::MatrixXd samples;  // N x n
  std::uint64_t seed = 0;
};

struct MeanCovariance {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Sample mean and unbiased (N-1) sample covariance, symmetrized.
MeanCovariance empirical_covariance(const SampleEnsemble& ensemble);

}  // namespace kle
