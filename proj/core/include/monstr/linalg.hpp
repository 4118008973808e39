#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace monstr {

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored. `x` holds the right-hand side on entry and the
/// solution on return; `scratch` needs n entries. No pivoting, so the matrix
/// should be diagonally dominant.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> x,
                       std::span<double> scratch);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct CgResult {
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Conjugate gradient for a symmetric positive definite operator
/// `apply(in, out)`. Starts from the contents of `x` and stops once the
/// residual norm drops to `abs_tol` or after `max_iters` steps.
template <typename ApplyOp>
CgResult conjugate_gradient(ApplyOp&& apply, std::span<const double> b, std::span<double> x,
                            double abs_tol, int max_iters) {
  const std::size_t n = b.size();
  std::vector<double> r(n), p(n), ap(n);
  apply(std::span<const double>(x.data(), n), std::span<double>(ap));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  double rr = dot(r, r);
  CgResult res;
  res.residual_norm = std::sqrt(rr);
  if (res.residual_norm <= abs_tol) return res;
  p = r;
  for (int it = 0; it < max_iters; ++it) {
    apply(std::span<const double>(p), std::span<double>(ap));
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_next = dot(r, r);
    res.iterations = it + 1;
    res.residual_norm = std::sqrt(rr_next);
    if (res.residual_norm <= abs_tol) break;
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return res;
}

}  // namespace monstr
