#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "json.hpp"
#include "nystrom.hpp"

namespace kle {

/// Tabular result of a check or parameter study. `parameters` holds every
/// input needed to regenerate the rows; `pass` is set only for checks with a
/// tolerance.
struct StudyReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::optional<bool> pass;
};

std::string report_to_csv(const StudyReport& report);
nlohmann::json report_to_json(const StudyReport& report);

/// sup over probe-point pairs of |c(x,y) - sum_{i<=m} lambda_i v_i(x)v_i(y)|.
/// Probe points that coincide with nodes use the stored nodal eigenvector
/// values; everything else goes through the extension formula. Modes with a
/// zero eigenvalue contribute nothing and are skipped.
double mercer_residual(const SpectralDecomposition& dec, Eigen::Index m,
                       const std::vector<double>& probe);

/// Diagonal-only variant, sup over probe points of
/// |c(x,x) - sum_{i<=m} lambda_i v_i(x)^2|. Unlike the off-diagonal sup,
/// this one is non-increasing in m since every term of the partial sum is
/// non-negative.
double mercer_diagonal_residual(const SpectralDecomposition& dec,
                                Eigen::Index m,
                                const std::vector<double>& probe);

struct TraceIdentity {
  double lambda_sum;
  double integral;
  double gap;
};

/// Compares the full discrete spectrum against the quadrature of the kernel
/// diagonal; requires a decomposition with all n modes retained.
TraceIdentity trace_identity_check(const SpectralDecomposition& dec);

struct CoefficientStats {
  Eigen::VectorXd mean;           // sample mean of each coefficient
  Eigen::MatrixXd second_moment;  // sample E[xi_i xi_j]
};

CoefficientStats coefficient_stats(const FieldEnsemble& ensemble);

/// Truncation-error gap of an alternative W-orthonormal basis against the
/// leading eigenbasis: sum_{i<=r} lambda_i - trace(U' W C W U). Non-negative
/// up to roundoff by the Ky Fan maximum principle.
double basis_optimality_gap(const KernelSpec& spec, const QuadratureRule& rule,
                            Eigen::Index r, const Eigen::MatrixXd& alt_basis);

/// Same gap computed from an existing full decomposition and kernel matrix.
double basis_optimality_gap(const SpectralDecomposition& dec,
                            const Eigen::MatrixXd& kernel_entries,
                            const Eigen::MatrixXd& alt_basis);

/// Relative eigenvalue errors against a fine reference grid; rows are
/// (n, k, relative_error) on the composite trapezoid rule.
StudyReport grid_refinement_study(const KernelSpec& spec,
                                  const std::vector<Eigen::Index>& index_set,
                                  const std::vector<Eigen::Index>& n_values,
                                  Eigen::Index n_ref);

/// Correlation curves c(x0, y)/sigma^2 of the exponential kernel for a sweep
/// of correlation lengths; rows are (ell, y, correlation).
StudyReport correlation_study(const Interval& interval, double sigma,
                              double x0, const std::vector<double>& y_grid,
                              const std::vector<double>& ells);

/// Bundled diagnostic suite: admissibility, trace identity, Mercer diagonal
/// residuals, Ky Fan gaps over random W-orthonormal bases, and coefficient
/// statistics of a sampled ensemble. Deterministic for fixed inputs.
std::vector<StudyReport> run_verification(const KernelSpec& spec,
                                          const QuadratureRule& rule,
                                          std::uint64_t seed);

/// Two-pass weighted Gram-Schmidt; columns come out W-orthonormal.
Eigen::MatrixXd w_orthonormalize(const Eigen::VectorXd& weights,
                                 Eigen::MatrixXd columns);

/// W-orthonormalized Gaussian random columns.
Eigen::MatrixXd random_w_orthonormal(const Eigen::VectorXd& weights,
                                     Eigen::Index r, std::uint64_t seed,
                                     std::uint64_t stream = 0);

/// W-orthonormalized truncated Fourier family {1, cos, sin, ...} on the rule
/// nodes.
Eigen::MatrixXd fourier_w_orthonormal(const QuadratureRule& rule,
                                      Eigen::Index r);

}  // namespace kle
