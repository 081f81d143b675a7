#pragma once

#include <Eigen/Core>

#include "kernels.hpp"
#include "quadrature.hpp"

namespace kle {

/// Eigenvalues (descending) and orthonormal eigenvectors of a symmetric
/// matrix.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Full decomposition of a symmetric matrix. The input must be symmetric to
/// 1e-12 (relative to its largest entry); eigenvector columns are orthonormal
/// and reconstruct the input to machine precision.
EigenDecomposition solve_symmetric_eigen(const Eigen::MatrixXd& matrix);

/// Discrete spectrum of the covariance operator obtained by quadrature:
/// evaluating the integral eigenproblem at the nodes gives C W v = lambda v,
/// solved in symmetric form W^{1/2} C W^{1/2} vt = lambda vt with
/// v = W^{-1/2} vt. Columns of eigvecs hold v_i at the nodes and satisfy
/// v_i' W v_j = delta_ij; eigenvalues are descending and non-negative.
struct SpectralDecomposition {
  QuadratureRule rule;
  KernelSpec kernel;
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd eigvecs;  // n x m

  Eigen::Index modes() const { return lambdas.size(); }
  Eigen::Index grid_size() const { return rule.nodes().size(); }
};

/// Solves the discretized covariance eigenproblem and keeps the leading
/// m <= n pairs. Small negative eigenvalues (within 1e-10 * lambda_1 of zero)
/// are clipped to zero; anything more negative throws InadmissibleKernel.
/// Eigenvector signs are fixed so the component of largest magnitude is
/// positive, making the decomposition deterministic for a fixed input.
SpectralDecomposition nystrom_eigen(const KernelSpec& spec,
                                    const QuadratureRule& rule,
                                    Eigen::Index m);

/// Eigenfunction value off the grid,
///   v_i(x) = lambda_i^{-1} sum_l w_l c(x, x_l) v_i(x_l),
/// which reproduces the stored nodal values when x is a node. Throws
/// DegenerateMode when lambda_i = 0.
double nystrom_extend(const SpectralDecomposition& dec, Eigen::Index i,
                      double x);

/// All retained eigenfunctions at x in one pass; requires every retained
/// eigenvalue to be positive.
Eigen::VectorXd nystrom_extend_all(const SpectralDecomposition& dec, double x);

/// Leading r modes of an existing decomposition.
SpectralDecomposition truncate(const SpectralDecomposition& dec,
                               Eigen::Index r);

}  // namespace kle
