#include "monstr/linalg.hpp"

namespace monstr {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> x,
                       std::span<double> scratch) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  scratch[0] = upper.size() > 0 && n > 1 ? upper[0] / diag[0] : 0.0;
  x[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * scratch[i - 1];
    scratch[i] = i + 1 < n ? upper[i] / m : 0.0;
    x[i] = (x[i] - lower[i] * x[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i] * x[i + 1];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace monstr
