#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "monstr/core.hpp"

namespace monstr::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  ScalarField field(Shape2D s) {
    ScalarField f(s);
    for (auto& v : f.values()) v = uniform();
    return f;
  }
  Sinogram sinogram(Shape2D s) {
    Sinogram f(s);
    for (auto& v : f.values()) v = uniform();
    return f;
  }
  TensorField2D tensor(Shape2D s) { return TensorField2D(field(s), field(s), field(s)); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double inner(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double tensor_norm(const TensorField2D& t) {
  double acc = 0.0;
  for (const auto& c : t.c) acc += inner(c.values(), c.values());
  return std::sqrt(acc);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline ShapeMask rectangle_mask(Shape2D grid, std::size_t r0, std::size_t c0, std::size_t rows,
                                std::size_t cols) {
  ShapeMask m(grid);
  for (std::size_t r = r0; r < r0 + rows; ++r)
    for (std::size_t c = c0; c < c0 + cols; ++c) m.set(r, c, true);
  return m;
}

}  // namespace monstr::test
