#include <gtest/gtest.h>

#include <cmath>

#include "monstr/metrics.hpp"
#include "support.hpp"

namespace monstr {
namespace {

TEST(Metrics, ScalarNrmse) {
  test::Gen gen(1);
  const ScalarField truth = gen.field({6, 7});
  const ShapeMask mask = test::rectangle_mask({6, 7}, 1, 1, 4, 5);
  EXPECT_EQ(nrmse(truth, truth, mask), 0.0);
  EXPECT_DOUBLE_EQ(nrmse(ScalarField({6, 7}), truth, mask), 1.0);
  ScalarField scaled = truth;
  for (auto& v : scaled.values()) v *= 1.25;
  EXPECT_NEAR(nrmse(scaled, truth, mask), 0.25, 1e-15);
  // Values outside the mask do not count.
  ScalarField off = truth;
  off(0, 0) += 100.0;
  EXPECT_EQ(nrmse(off, truth, mask), 0.0);
}

TEST(Metrics, TensorNrmseMatchesStackedOracle) {
  test::Gen gen(2);
  const TensorField2D truth = gen.tensor({5, 5}), est = gen.tensor({5, 5});
  const ShapeMask mask = test::rectangle_mask({5, 5}, 0, 1, 5, 3);
  double e = 0.0, n = 0.0;
  for (auto k : kComponents)
    for (std::size_t j = 0; j < 25; ++j)
      if (mask[j] != 0.0) {
        e += (est[k][j] - truth[k][j]) * (est[k][j] - truth[k][j]);
        n += truth[k][j] * truth[k][j];
      }
  const NrmseReport r = nrmse(est, truth, mask);
  EXPECT_NEAR(r.total, std::sqrt(e / n), 1e-15);
  EXPECT_NEAR(r.xx, nrmse(est.xx(), truth.xx(), mask), 1e-15);
  EXPECT_NEAR(r.yy, nrmse(est.yy(), truth.yy(), mask), 1e-15);
  EXPECT_NEAR(r.xy, nrmse(est.xy(), truth.xy(), mask), 1e-15);
}

TEST(Metrics, Errors) {
  test::Gen gen(3);
  const ShapeMask mask = test::rectangle_mask({4, 4}, 0, 0, 2, 2);
  EXPECT_THROW(nrmse(gen.field({4, 5}), gen.field({4, 4}), mask), ShapeError);
  EXPECT_THROW(nrmse(gen.field({4, 4}), gen.field({4, 4}), ShapeMask({5, 4})), ShapeError);
  EXPECT_THROW(nrmse(gen.field({4, 4}), ScalarField({4, 4}), mask), std::domain_error);

  TensorField2D truth = gen.tensor({4, 4});
  truth.xy().fill(0.0);
  const NrmseReport r = nrmse(gen.tensor({4, 4}), truth, mask);
  EXPECT_TRUE(std::isnan(r.xy));
  EXPECT_TRUE(std::isfinite(r.total));
}

TEST(Metrics, ErrorField) {
  test::Gen gen(4);
  const TensorField2D a = gen.tensor({3, 3}), b = gen.tensor({3, 3});
  const TensorField2D e = error_field(a, b, 10.0);
  for (auto k : kComponents)
    for (std::size_t j = 0; j < 9; ++j) EXPECT_DOUBLE_EQ(e[k][j], 10.0 * (a[k][j] - b[k][j]));
  EXPECT_THROW(error_field(a, gen.tensor({3, 4}), 1.0), ShapeError);
}

}  // namespace
}  // namespace monstr
