#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rng.hpp"

namespace kle_test {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed) {
  kle::GaussianStream stream(seed, 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = stream.next_normal();
    }
  }
  return m;
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd m = random_matrix(n, n, seed);
  return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd m = random_matrix(n, n, seed);
  return m * m.transpose() + Eigen::MatrixXd::Identity(n, n) * 1e-3;
}

/// Orthonormal n x r matrix from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index r,
                                          std::uint64_t seed) {
  const Eigen::MatrixXd m = random_matrix(n, r, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
}

}  // namespace kle_test
