#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "monstr/elasticity.hpp"
#include "monstr/forward_model.hpp"
#include "monstr/projector.hpp"
#include "support.hpp"

namespace monstr {
namespace {

Eigen::Matrix3d to_eigen(const Matrix3& m) {
  Eigen::Matrix3d e;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) e(r, c) = m[r][c];
  return e;
}

TEST(Elasticity, StiffnessEntries) {
  const double E = 2.5, nu = 0.3;
  const Matrix3 c = stiffness_matrix(E, nu);
  const double f = E / (1 - nu * nu);
  EXPECT_DOUBLE_EQ(c[0][0], f);
  EXPECT_DOUBLE_EQ(c[1][1], f);
  EXPECT_DOUBLE_EQ(c[0][1], f * nu);
  EXPECT_DOUBLE_EQ(c[1][0], f * nu);
  EXPECT_DOUBLE_EQ(c[2][2], f * (1 - nu));
  EXPECT_EQ(c[0][2], 0.0);
  EXPECT_EQ(c[2][0], 0.0);
}

TEST(Elasticity, ComplianceIsInverse) {
  test::Gen gen(3);
  for (int trial = 0; trial < 25; ++trial) {
    const double E = gen.uniform(0.1, 300.0), nu = gen.uniform(-0.9, 0.49);
    const Eigen::Matrix3d inv = to_eigen(stiffness_matrix(E, nu)).inverse();
    const Eigen::Matrix3d got = to_eigen(compliance_matrix(E, nu));
    EXPECT_LT((inv - got).norm(), 1e-12 * inv.norm()) << "E " << E << " nu " << nu;
  }
}

TEST(Elasticity, RejectsUnphysicalMaterial) {
  EXPECT_THROW(stiffness_matrix(0.0, 0.3), ConfigError);
  EXPECT_THROW(stiffness_matrix(1.0, 0.5), ConfigError);
  EXPECT_THROW(stiffness_matrix(1.0, -1.0), ConfigError);
  EXPECT_THROW(ElasticityModel(-1.0, 0.3), ConfigError);
}

TEST(Elasticity, StressStrainRoundTrip) {
  test::Gen gen(4);
  const ElasticityModel model(1.0, 0.3);
  const TensorField2D eps = gen.tensor({6, 5});
  const TensorField2D back = stress_to_strain(strain_to_stress(eps, model), model);
  for (auto k : kComponents) EXPECT_LT(test::max_abs_diff(eps[k].values(), back[k].values()), 1e-14);
}

TEST(ForwardModel, DirectionWeights) {
  for (double th : {0.0, 0.3, std::numbers::pi / 4, 1.2, std::numbers::pi / 2, 2.9}) {
    const Vector3 w = direction_weights(th);
    EXPECT_DOUBLE_EQ(w[0], std::cos(th) * std::cos(th));
    EXPECT_DOUBLE_EQ(w[1], std::sin(th) * std::sin(th));
    EXPECT_DOUBLE_EQ(w[2], std::sin(2 * th));
  }
}

TEST(ForwardModel, WeightTildeIsWTimesCompliance) {
  const Geometry g = Geometry::uniform(4, 4, 7, 4);
  const ElasticityModel model(1.7, 0.25);
  const RayWeights rw = compute_weights(g, model);
  const Eigen::Matrix3d cinv = to_eigen(model.stiffness()).inverse();
  for (std::size_t i = 0; i < g.num_rays(); ++i) {
    const Vector3 w = direction_weights(g.angles[i / g.num_detector_cols]);
    const Eigen::RowVector3d expected = Eigen::RowVector3d(w[0], w[1], w[2]) * cinv;
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(rw.w_tilde[i][k], expected(k), 1e-14);
  }
}

class ConstantStrain : public ::testing::Test {
 protected:
  Geometry g = Geometry::reference();
  Projector a{g};
  ShapeMask mask = test::rectangle_mask(g.grid(), 41, 18, 45, 91);

  StrainSinogram run(double exx, double eyy, double exy) {
    TensorField2D eps(g.grid());
    eps.xx().fill(exx);
    eps.yy().fill(eyy);
    eps.xy().fill(exy);
    return synthesize_strain_sinogram(eps, mask, a);
  }
};

TEST_F(ConstantStrain, HydrostaticGivesConstantAverage) {
  const double e0 = 3.7e-4;
  const StrainSinogram s = run(e0, e0, 0.0);
  const Sinogram avg = s.average_strain();
  ASSERT_GT(s.num_valid(), 0u);
  for (std::size_t i = 0; i < avg.size(); ++i) {
    if (s.valid[i] == 0.0) continue;
    EXPECT_LT(std::abs(avg[i] - e0), 1e-12) << "ray " << i;
  }
}

TEST_F(ConstantStrain, PureShearGivesSinTwoTheta) {
  const double gamma = -2.2e-4;
  const StrainSinogram s = run(0.0, 0.0, gamma);
  const Sinogram avg = s.average_strain();
  for (std::size_t i = 0; i < avg.size(); ++i) {
    if (s.valid[i] == 0.0) continue;
    const double th = g.angles[i / g.num_detector_cols];
    EXPECT_LT(std::abs(avg[i] - gamma * std::sin(2 * th)), 1e-12) << "ray " << i;
  }
}

TEST_F(ConstantStrain, InvalidRaysCarryNothing) {
  const StrainSinogram s = run(1e-4, 2e-4, 0.5e-4);
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (s.path_lengths[i] > kMinPathLength) {
      EXPECT_EQ(s.valid[i], 1.0);
    } else {
      EXPECT_EQ(s.valid[i], 0.0);
      EXPECT_EQ(s.y[i], 0.0);
    }
  }
}

TEST_F(ConstantStrain, StrainOutsideMaskIgnored) {
  TensorField2D eps(g.grid());
  eps.xx().fill(1e-4);
  TensorField2D noisy = eps;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j] == 0.0) noisy.xx()[j] = 5.0;
  EXPECT_TRUE(synthesize_strain_sinogram(eps, mask, a) == synthesize_strain_sinogram(noisy, mask, a));
}

TEST_F(ConstantStrain, NoiseStatistics) {
  const StrainSinogram clean = run(1e-4, -5e-5, 2e-5);
  const StrainSinogram noisy = add_noise(clean, 10.0, 99);
  const Sinogram a0 = clean.average_strain(), a1 = noisy.average_strain();
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a0.size(); ++i) {
    if (clean.valid[i] == 0.0) {
      EXPECT_EQ(noisy.y[i], clean.y[i]);
      continue;
    }
    const double d = a1[i] - a0[i];
    sum += d;
    sum2 += d * d;
    ++n;
  }
  ASSERT_GE(n, 4000u);
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sum2 / static_cast<double>(n) - mean * mean);
  EXPECT_NEAR(sd, 1e-5, 0.05e-5);
}

TEST_F(ConstantStrain, NoiseDeterministicAndLinearInSigma) {
  const StrainSinogram clean = run(1e-4, 0.0, 0.0);
  EXPECT_TRUE(add_noise(clean, 10.0, 7) == add_noise(clean, 10.0, 7));
  EXPECT_FALSE(add_noise(clean, 10.0, 7) == add_noise(clean, 10.0, 8));
  const StrainSinogram n1 = add_noise(clean, 10.0, 7), n2 = add_noise(clean, 20.0, 7);
  for (std::size_t i = 0; i < clean.y.size(); ++i) {
    EXPECT_NEAR(n2.y[i] - clean.y[i], 2.0 * (n1.y[i] - clean.y[i]), 1e-15);
  }
}

TEST(ForwardModel, SubsampleIndices) {
  EXPECT_EQ(subsample_indices(50, 10), (std::vector<std::size_t>{0, 5, 10, 15, 20, 25, 30, 35, 40, 45}));
  EXPECT_EQ(subsample_indices(50, 50).size(), 50u);
  EXPECT_EQ(subsample_indices(7, 3), (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_THROW(subsample_indices(5, 0), ConfigError);
  EXPECT_THROW(subsample_indices(5, 6), ConfigError);
}

TEST(ForwardModel, SubsampleKeepsRowsAndAngles) {
  const Geometry g = Geometry::uniform(16, 16, 12, 20);
  const Projector a(g);
  TensorField2D eps(g.grid());
  eps.xx().fill(1e-4);
  const StrainSinogram full = synthesize_strain_sinogram(eps, test::rectangle_mask(g.grid(), 4, 3, 8, 10), a);
  const StrainSinogram sub = subsample_views(full, 4);
  ASSERT_EQ(sub.geometry.num_views, 4u);
  const auto idx = subsample_indices(12, 4);
  for (std::size_t v = 0; v < 4; ++v) {
    EXPECT_EQ(sub.geometry.angles[v], g.angles[idx[v]]);
    for (std::size_t c = 0; c < 20; ++c) {
      EXPECT_EQ(sub.y(v, c), full.y(idx[v], c));
      EXPECT_EQ(sub.path_lengths(v, c), full.path_lengths(idx[v], c));
    }
  }
  // The subsampled geometry must reproduce the kept rows exactly.
  EXPECT_TRUE(Projector(sub.geometry).path_lengths(test::rectangle_mask(g.grid(), 4, 3, 8, 10)) ==
              sub.path_lengths);
}

}  // namespace
}  // namespace monstr
