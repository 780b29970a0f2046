#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rgbdsde {

/// Number of monomials of total degree <= degree in `dim` variables.
std::size_t basis_dimension(std::size_t dim, int degree);

// Least-squares projection onto monomials of the (standardized) features up to
// a total degree. The decomposition is computed once and reused for every
// target vector. Feature coordinates with zero spread are dropped, and a
// rank-deficient design is solved in the minimum-norm sense.
//
// Fits are shift-equivariant by construction: targets are centred on their
// first entry before solving, so a constant target is reproduced bit-exactly.
class LeastSquaresRegressor {
 public:
  /// features: row-major [rows x dim]. dim = 0 yields the sample mean.
  LeastSquaresRegressor(std::span<const double> features, std::size_t rows, std::size_t dim, int degree);

  std::size_t rows() const { return rows_; }
  std::size_t basis_size() const { return basis_size_; }

  /// Writes fitted values; returns coefficients in the standardized basis
  /// (intercept first).
  Eigen::VectorXd fit(std::span<const double> targets, std::span<double> fitted) const;

 private:
  std::size_t rows_;
  std::size_t basis_size_;
  Eigen::MatrixXd design_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver_;
};

struct RegressionResult {
  std::vector<double> coeffs;
  std::vector<double> fitted;
};

/// One-shot regression. Requires rows >= 10 * basis_dimension(dim, degree).
RegressionResult regress_conditional(std::span<const double> features, std::size_t dim,
                                     std::span<const double> targets, int degree);

/// Mean of values computed as v0 + mean(v - v0), exact when all values agree.
double stable_mean(std::span<const double> values);

}  // namespace rgbdsde
