#pragma once

// Test-only reference for the exhaustive local surrogate. Shares no code with
// the library: it enumerates masks itself, builds the augmented normal
// equations with an unpenalized intercept, and solves them by Gaussian
// elimination with partial pivoting.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace proact::testing {

struct OracleFit {
  double intercept = 0.0;
  std::vector<double> weights;
};

inline std::vector<double> gaussianSolve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    }
    if (std::fabs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// `target(presence)` returns the class probability for a presence vector.
inline OracleFit exhaustiveRidgeOracle(std::size_t n, double kernelWidth, double lambda,
                                       const std::function<double(const std::vector<int>&)>& target) {
  const std::size_t dim = n + 1;
  std::vector<std::vector<double>> lhs(dim, std::vector<double>(dim, 0.0));
  std::vector<double> rhs(dim, 0.0);
  std::vector<int> z(n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    int kept = 0;
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = static_cast<int>((bits >> j) & 1U);
      kept += z[j];
    }
    // cosine distance between z and the all-ones vector
    const double cosine = kept == 0 ? 0.0 : kept / (std::sqrt(static_cast<double>(kept)) * std::sqrt(double(n)));
    const double d = 1.0 - cosine;
    const double w = std::exp(-(d * d) / (kernelWidth * kernelWidth));
    const double y = target(z);
    std::vector<double> row(dim);
    row[0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) row[j + 1] = z[j];
    for (std::size_t r = 0; r < dim; ++r) {
      rhs[r] += w * row[r] * y;
      for (std::size_t c = 0; c < dim; ++c) lhs[r][c] += w * row[r] * row[c];
    }
  }
  for (std::size_t j = 1; j < dim; ++j) lhs[j][j] += lambda;
  const auto sol = gaussianSolve(lhs, rhs);
  OracleFit fit;
  fit.intercept = sol[0];
  fit.weights.assign(sol.begin() + 1, sol.end());
  return fit;
}

}  // namespace proact::testing
