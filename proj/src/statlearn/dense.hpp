#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace sedm::learn::detail {

/// Solves A x = b for a symmetric positive definite row-major d x d matrix.
/// Returns nothing when a pivot falls below `tolerance` times the largest diagonal entry.
inline std::optional<std::vector<double>> cholesky_solve(std::vector<double> a, std::vector<double> b, double tolerance = 1e-12) {
  const std::size_t d = b.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::abs(a[i * d + i]));
  if (!(scale > 0.0)) return std::nullopt;
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (!(diag > tolerance * scale)) return std::nullopt;
    const double l = std::sqrt(diag);
    a[j * d + j] = l;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / l;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i * d + k] * b[k];
    b[i] /= a[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    for (std::size_t k = i + 1; k < d; ++k) b[i] -= a[k * d + i] * b[k];
    b[i] /= a[i * d + i];
  }
  return b;
}

}  // namespace sedm::learn::detail
