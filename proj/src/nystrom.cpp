#include "nystrom.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace kle {
namespace {

constexpr double kClipTolerance = 1e-10;

void fix_column_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index at = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&at);
    if (vectors(at, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace

EigenDecomposition solve_symmetric_eigen(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
    throw InvalidArgument("eigen solve requires a square matrix");
  }
  const double scale = matrix.cwiseAbs().maxCoeff();
  const double asymmetry = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-12 * std::max(1.0, scale)) {
    throw InvalidArgument("matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigenvalue solve did not converge");
  }
  // Eigen returns ascending order; flip to descending.
  EigenDecomposition dec;
  dec.values = solver.eigenvalues().reverse();
  dec.vectors = solver.eigenvectors().rowwise().reverse();
  fix_column_signs(dec.vectors);
  return dec;
}

SpectralDecomposition nystrom_eigen(const KernelSpec& spec,
                                    const QuadratureRule& rule,
                                    Eigen::Index m) {
  const Eigen::Index n = rule.size();
  if (m < 1 || m > n) {
    throw InvalidArgument("nystrom_eigen requires 1 <= m <= n");
  }

  const KernelMatrix km = kernel_matrix(spec, rule);
  const Eigen::VectorXd root_w = rule.weights().cwiseSqrt();
  Eigen::MatrixXd scaled =
      root_w.asDiagonal() * km.entries * root_w.asDiagonal();
  scaled = ((scaled + scaled.transpose()) * 0.5).eval();

  EigenDecomposition sym = solve_symmetric_eigen(scaled);

  const double lead = std::max(sym.values[0], 0.0);
  const double floor = -kClipTolerance * lead;
  if (sym.values[n - 1] < floor) {
    throw InadmissibleKernel(
        "kernel is not positive semidefinite on this grid (min eigenvalue " +
        std::to_string(sym.values[n - 1]) + ")");
  }

  SpectralDecomposition dec{rule, spec, sym.values.head(m),
                            Eigen::MatrixXd(n, m)};
  // Anything inside the clip band is indistinguishable from zero at solver
  // accuracy, whichever side of zero it landed on.
  const double noise_floor = kClipTolerance * lead;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (dec.lambdas[i] <= noise_floor) dec.lambdas[i] = 0.0;
    dec.eigvecs.col(i) = sym.vectors.col(i).cwiseQuotient(root_w);
  }
  fix_column_signs(dec.eigvecs);
  return dec;
}

double nystrom_extend(const SpectralDecomposition& dec, Eigen::Index i,
                      double x) {
  if (i < 0 || i >= dec.modes()) {
    throw InvalidArgument("eigenfunction index out of range");
  }
  if (!dec.rule.interval().contains(x)) {
    throw InvalidArgument("extension point outside the interval");
  }
  if (!(dec.lambdas[i] > 0.0)) {
    throw DegenerateMode("cannot extend an eigenfunction with zero eigenvalue");
  }
  const Eigen::VectorXd& nodes = dec.rule.nodes();
  const Eigen::VectorXd& w = dec.rule.weights();
  double acc = 0.0;
  for (Eigen::Index l = 0; l < nodes.size(); ++l) {
    acc += w[l] * dec.kernel.value(x, nodes[l]) * dec.eigvecs(l, i);
  }
  return acc / dec.lambdas[i];
}

Eigen::VectorXd nystrom_extend_all(const SpectralDecomposition& dec, double x) {
  if (!dec.rule.interval().contains(x)) {
    throw InvalidArgument("extension point outside the interval");
  }
  const Eigen::Index m = dec.modes();
  if (m > 0 && !(dec.lambdas[m - 1] > 0.0)) {
    throw DegenerateMode("cannot extend an eigenfunction with zero eigenvalue");
  }
  const Eigen::VectorXd& nodes = dec.rule.nodes();
  Eigen::VectorXd weighted_row(nodes.size());
  for (Eigen::Index l = 0; l < nodes.size(); ++l) {
    weighted_row[l] = dec.rule.weights()[l] * dec.kernel.value(x, nodes[l]);
  }
  return (dec.eigvecs.transpose() * weighted_row).cwiseQuotient(dec.lambdas);
}

SpectralDecomposition truncate(const SpectralDecomposition& dec,
                               Eigen::Index r) {
  if (r < 0 || r > dec.modes()) {
    throw InvalidArgument("truncation rank out of range");
  }
  return SpectralDecomposition{dec.rule, dec.kernel, dec.lambdas.head(r),
                               dec.eigvecs.leftCols(r)};
}

}  // namespace kle
