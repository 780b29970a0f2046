#include "rgbdsde/regression.hpp"

#include <cmath>
#include <string>

#include "rgbdsde/error.hpp"

namespace rgbdsde {

namespace {

// Exponent tuples of total degree <= degree, ordered by total degree.
std::vector<std::vector<int>> monomials(std::size_t dim, int degree) {
  std::vector<std::vector<int>> out{std::vector<int>(dim, 0)};
  for (int total = 1; total <= degree; ++total) {
    std::vector<int> e(dim, 0);
    // Enumerate compositions of `total` into `dim` parts.
    auto rec = [&](auto&& self, std::size_t k, int left) -> void {
      if (k + 1 == dim) {
        e[k] = left;
        out.push_back(e);
        return;
      }
      for (int v = left; v >= 0; --v) {
        e[k] = v;
        self(self, k + 1, left - v);
      }
    };
    if (dim > 0) rec(rec, 0, total);
  }
  return out;
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError(std::string("regression: non-finite ") + what);
}

}  // namespace

std::size_t basis_dimension(std::size_t dim, int degree) {
  // C(dim + degree, degree)
  std::size_t r = 1;
  for (int k = 1; k <= degree; ++k) r = r * (dim + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
  return r;
}

double stable_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double anchor = values[0];
  double s = 0.0;
  for (double v : values) s += v - anchor;
  return anchor + s / static_cast<double>(values.size());
}

LeastSquaresRegressor::LeastSquaresRegressor(std::span<const double> features, std::size_t rows, std::size_t dim,
                                             int degree)
    : rows_(rows), basis_size_(1) {
  if (rows == 0) throw ConfigError("regression: no samples");
  if (degree < 0) throw ConfigError("regression: negative degree");
  if (features.size() != rows * dim) throw ConfigError("regression: feature array has wrong size");
  require_finite(features, "feature");

  std::vector<std::size_t> active;
  std::vector<double> mean(dim, 0.0), scale(dim, 1.0);
  for (std::size_t k = 0; k < dim; ++k) {
    double s = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += features[r * dim + k];
    mean[k] = s / static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) sq += (features[r * dim + k] - mean[k]) * (features[r * dim + k] - mean[k]);
    const double sd = std::sqrt(sq / static_cast<double>(rows));
    if (sd > 1e-12 * (1.0 + std::abs(mean[k]))) {
      active.push_back(k);
      scale[k] = sd;
    }
  }
  if (active.empty() || degree == 0) return;

  const auto powers = monomials(active.size(), degree);
  basis_size_ = powers.size();
  design_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(basis_size_));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t b = 0; b < basis_size_; ++b) {
      double v = 1.0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const std::size_t k = active[a];
        const double u = (features[r * dim + k] - mean[k]) / scale[k];
        for (int p = 0; p < powers[b][a]; ++p) v *= u;
      }
      design_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b)) = v;
    }
  solver_.compute(design_);
}

Eigen::VectorXd LeastSquaresRegressor::fit(std::span<const double> targets, std::span<double> fitted) const {
  if (targets.size() != rows_ || fitted.size() != rows_) throw ConfigError("regression: target size mismatch");
  require_finite(targets, "target");
  const double anchor = targets[0];
  if (basis_size_ == 1) {
    const double m = stable_mean(targets);
    std::fill(fitted.begin(), fitted.end(), m);
    return Eigen::VectorXd::Constant(1, m);
  }
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows_));
  for (std::size_t r = 0; r < rows_; ++r) rhs(static_cast<Eigen::Index>(r)) = targets[r] - anchor;
  Eigen::VectorXd coef = solver_.solve(rhs);
  const Eigen::VectorXd values = design_ * coef;
  for (std::size_t r = 0; r < rows_; ++r) fitted[r] = anchor + values(static_cast<Eigen::Index>(r));
  coef(0) += anchor;
  return coef;
}

RegressionResult regress_conditional(std::span<const double> features, std::size_t dim,
                                     std::span<const double> targets, int degree) {
  const std::size_t rows = targets.size();
  const std::size_t need = 10 * basis_dimension(dim, degree);
  if (rows < need)
    throw ConfigError("regress_conditional: " + std::to_string(rows) + " samples, at least " + std::to_string(need) +
                      " required");
  LeastSquaresRegressor reg(features, rows, dim, degree);
  RegressionResult out;
  out.fitted.resize(rows);
  const Eigen::VectorXd c = reg.fit(targets, out.fitted);
  out.coeffs.assign(c.data(), c.data() + c.size());
  return out;
}

}  // namespace rgbdsde
