#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "monstr/agents.hpp"
#include "monstr/parallel.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace monstr {
namespace {

// ---------------------------------------------------------------------------
// Detector

double detector_objective(const Vector3& p, const Vector3& p0, double y, const Vector3& w,
                          double alpha) {
  const double r = y - (w[0] * p[0] + w[1] * p[1] + w[2] * p[2]);
  double d = 0.0;
  for (int k = 0; k < 3; ++k) d += (p[k] - p0[k]) * (p[k] - p0[k]);
  return r * r / (2 * alpha * alpha) + d;
}

TEST(DetectorAgent, MatchesDenseNormalEquations) {
  test::Gen gen(21);
  double worst = 0.0;
  for (int ray = 0; ray < 100; ++ray) {
    const Vector3 p0{gen.uniform(-50, 50), gen.uniform(-50, 50), gen.uniform(-50, 50)};
    const Vector3 w{gen.uniform(), gen.uniform(), gen.uniform()};
    const double y = gen.uniform(-20, 20);
    const double alpha = std::pow(10.0, gen.uniform(-3, 1));
    const Eigen::Vector3d expected = test::dense_detector_prox(p0, y, w, alpha);
    const Vector3 got = detector_prox(p0, y, w, alpha);
    const double dev = (Eigen::Vector3d(got[0], got[1], got[2]) - expected).norm() / expected.norm();
    worst = std::max(worst, dev);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(DetectorAgent, StationaryAndNoWorseThanEndpoints) {
  test::Gen gen(22);
  for (int ray = 0; ray < 200; ++ray) {
    const Vector3 p0{gen.uniform(-5, 5), gen.uniform(-5, 5), gen.uniform(-5, 5)};
    const Vector3 w{gen.uniform(), gen.uniform(), gen.uniform()};
    const double y = gen.uniform(-5, 5);
    const double alpha = gen.uniform(0.01, 2.0);
    const Vector3 p = detector_prox(p0, y, w, alpha);
    const double r = y - (w[0] * p[0] + w[1] * p[1] + w[2] * p[2]);
    double g2 = 0.0, n0 = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double g = -w[k] * r / (alpha * alpha) + 2.0 * (p[k] - p0[k]);
      g2 += g * g;
      n0 += p0[k] * p0[k];
    }
    EXPECT_LT(std::sqrt(g2), 1e-8 * (1.0 + std::sqrt(n0)));

    const double ww = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    const double m0 = y - (w[0] * p0[0] + w[1] * p0[1] + w[2] * p0[2]);
    const Vector3 fit{p0[0] + w[0] * m0 / ww, p0[1] + w[1] * m0 / ww, p0[2] + w[2] * m0 / ww};
    const double f = detector_objective(p, p0, y, w, alpha);
    EXPECT_LE(f, detector_objective(p0, p0, y, w, alpha) + 1e-12);
    EXPECT_LE(f, detector_objective(fit, p0, y, w, alpha) + 1e-12);
  }
}

TEST(DetectorAgent, LimitsOfAlpha) {
  const Vector3 p0{1.0, -2.0, 0.5}, w{0.3, 0.6, -0.2};
  const double y = 4.0;
  const Vector3 loose = detector_prox(p0, y, w, 1e9);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(loose[k], p0[k], 1e-6 * std::abs(p0[k]));
  const Vector3 tight = detector_prox(p0, y, w, 1e-9);
  EXPECT_NEAR(w[0] * tight[0] + w[1] * tight[1] + w[2] * tight[2], y, 1e-9);
}

TEST(DetectorAgent, InvalidRaysPassThrough) {
  const Geometry g = Geometry::uniform(4, 4, 3, 5);
  StrainSinogram s;
  s.geometry = g;
  s.y = Sinogram(g.sinogram(), 1.0);
  s.path_lengths = Sinogram(g.sinogram(), 2.0);
  s.valid = Sinogram(g.sinogram(), 1.0);
  s.valid(1, 2) = 0.0;
  s.y(1, 2) = 0.0;
  s.path_lengths(1, 2) = 0.0;
  test::Gen gen(1);
  VirtualSinogramTensor p0(gen.sinogram(g.sinogram()), gen.sinogram(g.sinogram()),
                           gen.sinogram(g.sinogram()));
  const auto out = detector_agent(p0, s, compute_weights(g, ElasticityModel()), 0.1);
  for (auto k : kComponents) EXPECT_EQ(out[k](1, 2), p0[k](1, 2));
  // At theta = 0 only xx and yy carry weight.
  EXPECT_NE(out.xx()(0, 0), p0.xx()(0, 0));
  EXPECT_NE(out.yy()(0, 0), p0.yy()(0, 0));
  EXPECT_EQ(out.xy()(0, 0), p0.xy()(0, 0));
  EXPECT_THROW(detector_agent(p0, s, compute_weights(g, ElasticityModel()), 0.0), ConfigError);
}

// ---------------------------------------------------------------------------
// qGGMRF prior

TEST(Qggmrf, NeighborhoodWeights) {
  double total = 0.0;
  for (const auto& nb : neighborhood()) {
    total += nb.weight;
    const bool diagonal = nb.dr != 0 && nb.dc != 0;
    const double edge = neighborhood()[1].weight;
    EXPECT_NEAR(nb.weight, diagonal ? edge / std::sqrt(2.0) : edge, 1e-15);
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Qggmrf, PotentialShape) {
  const QggmrfPrior prior({1.2, 2.0, 1.0, 0.7});
  EXPECT_EQ(prior.potential(0.0), 0.0);
  test::Gen gen(2);
  for (int i = 0; i < 200; ++i) {
    const double d = gen.uniform(-10, 10);
    EXPECT_DOUBLE_EQ(prior.potential(d), prior.potential(-d));
    EXPECT_GE(prior.potential(d), 0.0);
    if (std::abs(d) > 1e-3) {
      EXPECT_LT(prior.potential(0.5 * d), prior.potential(d));
    }
  }
  // Small differences are quadratic with scale sigma_x.
  EXPECT_NEAR(prior.potential(1e-6) / (1e-12 / (2 * 0.49)), 1.0, 1e-3);
}

TEST(Qggmrf, SurrogateCoefficientIsHalfDerivativeOverDelta) {
  const QggmrfPrior prior({1.2, 2.0, 1.0, 0.7});
  test::Gen gen(3);
  for (int i = 0; i < 100; ++i) {
    const double d = gen.uniform(0.01, 8.0) * (gen.uniform() < 0 ? -1 : 1);
    const double h = 1e-6 * std::max(1.0, std::abs(d));
    const double deriv = (prior.potential(d + h) - prior.potential(d - h)) / (2 * h);
    EXPECT_NEAR(prior.surrogate_coefficient(d), deriv / (2 * d),
                1e-6 * std::abs(deriv / (2 * d)));
  }
}

TEST(Qggmrf, SurrogateMajorizes) {
  const QggmrfPrior prior({1.2, 2.0, 1.0, 0.7});
  test::Gen gen(4);
  for (int i = 0; i < 500; ++i) {
    const double d0 = gen.uniform(-6, 6), d = gen.uniform(-6, 6);
    const double bound = prior.potential(d0) + prior.surrogate_coefficient(d0) * (d * d - d0 * d0);
    EXPECT_LE(prior.potential(d), bound + 1e-12);
  }
}

TEST(Qggmrf, RejectsBadParameters) {
  EXPECT_THROW(QggmrfPrior({1.0, 2.0, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(QggmrfPrior({1.2, 1.8, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(QggmrfPrior({1.2, 2.0, 1.0, 0.0}), ConfigError);
}

// ---------------------------------------------------------------------------
// Reconstruction

class Recon : public ::testing::Test {
 protected:
  Geometry g = Geometry::uniform(24, 24, 36, 35);
  Projector a{g};

  ScalarField smooth_field() const {
    ScalarField f(g.grid());
    for (std::size_t r = 0; r < 24; ++r)
      for (std::size_t c = 0; c < 24; ++c) {
        const double x = (c - 11.5) / 12.0, y = (r - 11.5) / 12.0;
        f(r, c) = 1.0 + 0.8 * x - 0.5 * y * y + 0.3 * x * y;
      }
    return f;
  }
};

TEST_F(Recon, ObjectiveNeverIncreases) {
  test::Gen gen(5);
  const Sinogram target = a.project(gen.field(g.grid()));
  const ReconstructionAgent agent(a, Sinogram(g.sinogram(), 1.0), 0.5, {1.2, 2.0, 1.0, 0.3}, 15);
  std::vector<double> trace;
  (void)agent.reconstruct(target, gen.field(g.grid()), &trace);
  ASSERT_EQ(trace.size(), 16u);
  for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] * (1 + 1e-12));
  EXPECT_LT(trace.back(), trace.front());
}

TEST_F(Recon, RecoversNoiselessField) {
  const ScalarField truth = smooth_field();
  const Sinogram target = a.project(truth);
  const ReconstructionAgent agent(a, Sinogram(g.sinogram(), 1.0), 1.0, {1.2, 2.0, 1.0, 1.0}, 200);
  const ScalarField x = agent.reconstruct(target, ScalarField(g.grid()));
  double e = 0.0, n = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    e += (x[j] - truth[j]) * (x[j] - truth[j]);
    n += truth[j] * truth[j];
  }
  EXPECT_LT(std::sqrt(e / n), 0.02);
}

TEST_F(Recon, RegionKeepsOutsidePixels) {
  const ShapeMask region = test::rectangle_mask(g.grid(), 6, 4, 10, 14);
  test::Gen gen(6);
  const ScalarField warm = gen.field(g.grid());
  const ReconstructionAgent agent(a, Sinogram(g.sinogram(), 1.0), 1.0, {1.2, 2.0, 1.0, 1.0}, 3,
                                  region);
  const ScalarField x = agent.reconstruct(a.project(smooth_field()), warm);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (region[j] == 0.0) EXPECT_EQ(x[j], warm[j]);
  }
}

TEST_F(Recon, ZeroWeightRaysIgnored) {
  test::Gen gen(7);
  Sinogram weights(g.sinogram(), 1.0);
  for (std::size_t c = 0; c < g.num_detector_cols; ++c) weights(3, c) = 0.0;
  const ReconstructionAgent agent(a, weights, 1.0, {1.2, 2.0, 1.0, 1.0}, 4);
  Sinogram t1 = a.project(smooth_field());
  Sinogram t2 = t1;
  for (std::size_t c = 0; c < g.num_detector_cols; ++c) t2(3, c) = 1e6;
  EXPECT_TRUE(agent.reconstruct(t1, ScalarField(g.grid())) ==
              agent.reconstruct(t2, ScalarField(g.grid())));
}

TEST_F(Recon, ComponentsIndependentAndThreadInvariant) {
  test::Gen gen(8);
  const ReconstructionAgent agent(a, Sinogram(g.sinogram(), 1.0), 1.0, {1.2, 2.0, 1.0, 1.0}, 3);
  const VirtualSinogramTensor t(gen.sinogram(g.sinogram()), gen.sinogram(g.sinogram()),
                                gen.sinogram(g.sinogram()));
  const TensorField2D warm = gen.tensor(g.grid());
  set_num_threads(1);
  const TensorField2D out1 = agent(t, warm);
  set_num_threads(3);
  const TensorField2D out3 = agent(t, warm);
  set_num_threads(0);
  for (auto k : kComponents) EXPECT_TRUE(out1[k] == out3[k]);

  // Relabel xx <-> xy: outputs swap the same way.
  const VirtualSinogramTensor ts(t.xy(), t.yy(), t.xx());
  const TensorField2D ws(warm.xy(), warm.yy(), warm.xx());
  const TensorField2D outs = agent(ts, ws);
  EXPECT_TRUE(outs.xx() == out1.xy());
  EXPECT_TRUE(outs.yy() == out1.yy());
  EXPECT_TRUE(outs.xy() == out1.xx());
}

// ---------------------------------------------------------------------------
// Equilibrium

TEST(EquilibriumAgent, ResidualMatchesDenseOperator) {
  test::Gen gen(30);
  const TensorField2D s = gen.tensor({7, 9});
  const ShapeMask region = test::rectangle_mask({7, 9}, 1, 2, 4, 6);
  for (const ShapeMask* reg : {static_cast<const ShapeMask*>(nullptr), &region}) {
    const Eigen::VectorXd expected = test::dense_equilibrium_operator(7, 9, reg) * test::stack(s);
    const auto d = equilibrium_residual(s, reg);
    for (std::size_t j = 0; j < 63; ++j) {
      EXPECT_NEAR(d[0][j], expected(static_cast<Eigen::Index>(j)), 1e-14);
      EXPECT_NEAR(d[1][j], expected(static_cast<Eigen::Index>(63 + j)), 1e-14);
    }
  }
}

TEST(EquilibriumAgent, DifferenceAdjoints) {
  test::Gen gen(31);
  const ShapeMask region = test::rectangle_mask({6, 8}, 1, 1, 4, 5);
  for (const ShapeMask* reg : {static_cast<const ShapeMask*>(nullptr), &region}) {
    const ScalarField f = gen.field({6, 8}), h = gen.field({6, 8});
    EXPECT_NEAR(test::inner(diff_x(f, reg).values(), h.values()),
                test::inner(f.values(), diff_x_adjoint(h, reg).values()), 1e-13);
    EXPECT_NEAR(test::inner(diff_y(f, reg).values(), h.values()),
                test::inner(f.values(), diff_y_adjoint(h, reg).values()), 1e-13);
  }
}

TEST(EquilibriumAgent, ConvergesToDenseSolve) {
  test::Gen gen(32);
  for (double alpha : {0.5, 1.0, 3.0}) {
    const TensorField2D s0 = gen.tensor({8, 8});
    const Eigen::VectorXd expected = test::dense_prox(s0, alpha, nullptr);
    const TensorField2D got = EquilibriumAgent(alpha, 2000, 1e-14)(s0);
    EXPECT_LT((test::stack(got) - expected).cwiseAbs().maxCoeff(), 1e-6) << "alpha " << alpha;
  }
}

TEST(EquilibriumAgent, ConvergesToDenseSolveWithRegion) {
  test::Gen gen(33);
  ShapeMask region = test::rectangle_mask({8, 8}, 1, 1, 6, 5);
  region.set(3, 6, true);
  const TensorField2D s0 = gen.tensor({8, 8});
  const Eigen::VectorXd expected = test::dense_prox(s0, 0.7, &region);
  const TensorField2D got = EquilibriumAgent(0.7, 2000, 1e-14, region)(s0);
  EXPECT_LT((test::stack(got) - expected).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EquilibriumAgent, NeverIncreasesImbalance) {
  test::Gen gen(34);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape2D shape{4 + gen.index(12), 4 + gen.index(12)};
    const TensorField2D s0 = gen.tensor(shape);
    const double alpha = std::pow(10.0, gen.uniform(-1.5, 1.0));
    const TensorField2D out = equilibrium_agent(s0, alpha, 3, 1e-10);
    EXPECT_LE(equilibrium_norm(out), equilibrium_norm(s0) * (1 + 1e-12)) << "trial " << trial;
  }
}

TEST(EquilibriumAgent, BlockUpdatesAreOptimal) {
  test::Gen gen(35);
  const TensorField2D s0 = gen.tensor({10, 12});
  const EquilibriumAgent agent(0.4, 1, 1e-10);
  const double tol = agent.cg_abs_tolerance(s0);
  TensorField2D s = gen.tensor({10, 12});
  agent.update_xx(s, s0);
  EXPECT_LT(norm2(agent.block_gradient(s, s0, Component::xx).values()), tol);
  agent.update_yy(s, s0);
  EXPECT_LT(norm2(agent.block_gradient(s, s0, Component::yy).values()), tol);
  agent.update_xy(s, s0);
  EXPECT_LT(norm2(agent.block_gradient(s, s0, Component::xy).values()), tol);
}

TEST(EquilibriumAgent, ObjectiveDecreasesPerBlock) {
  test::Gen gen(36);
  const TensorField2D s0 = gen.tensor({9, 9});
  const EquilibriumAgent agent(0.3, 1, 1e-12);
  TensorField2D s = s0;
  double prev = agent.objective(s, s0);
  for (int sweep = 0; sweep < 5; ++sweep) {
    agent.update_xx(s, s0);
    const double a = agent.objective(s, s0);
    agent.update_yy(s, s0);
    const double b = agent.objective(s, s0);
    agent.update_xy(s, s0);
    const double c = agent.objective(s, s0);
    EXPECT_LE(a, prev + 1e-12);
    EXPECT_LE(b, a + 1e-12);
    EXPECT_LE(c, b + 1e-12);
    prev = c;
  }
}

TEST(EquilibriumAgent, ConstantFieldUnchanged) {
  TensorField2D s0({8, 11});
  s0.xx().fill(2.0);
  s0.yy().fill(-1.0);
  s0.xy().fill(0.5);
  const TensorField2D out = equilibrium_agent(s0, 0.2, 3, 1e-12);
  for (auto k : kComponents) EXPECT_LT(test::max_abs_diff(out[k].values(), s0[k].values()), 1e-10);
}

TEST(EquilibriumAgent, WeakLimitIsIdentity) {
  test::Gen gen(37);
  const TensorField2D s0 = gen.tensor({8, 8});
  const TensorField2D out = equilibrium_agent(s0, 1e9, 3, 1e-10);
  EXPECT_LT((test::stack(out) - test::stack(s0)).cwiseAbs().maxCoeff() / test::tensor_norm(s0), 1e-6);
}

TEST(EquilibriumAgent, ThreadInvariant) {
  test::Gen gen(38);
  const TensorField2D s0 = gen.tensor({20, 30});
  set_num_threads(1);
  const TensorField2D a = equilibrium_agent(s0, 0.3, 3, 1e-10);
  set_num_threads(4);
  const TensorField2D b = equilibrium_agent(s0, 0.3, 3, 1e-10);
  set_num_threads(0);
  for (auto k : kComponents) EXPECT_TRUE(a[k] == b[k]);
}

TEST(EquilibriumAgent, RejectsBadParameters) {
  EXPECT_THROW(EquilibriumAgent(0.0, 3, 1e-10), ConfigError);
  EXPECT_THROW(EquilibriumAgent(1.0, 0, 1e-10), ConfigError);
  EXPECT_THROW(EquilibriumAgent(1.0, 3, -1.0), ConfigError);
}

// ---------------------------------------------------------------------------
// Support

TEST(SupportAgent, MaskIdentities) {
  test::Gen gen(40);
  const TensorField2D s = gen.tensor({5, 6});
  ShapeMask ones({5, 6});
  ones.fill(1.0);
  const TensorField2D same = support_agent(s, ones);
  for (auto k : kComponents) EXPECT_TRUE(same[k] == s[k]);
  const TensorField2D zero = support_agent(s, ShapeMask({5, 6}));
  for (auto k : kComponents)
    for (double v : zero[k].values()) EXPECT_EQ(v, 0.0);
  const ShapeMask m = test::rectangle_mask({5, 6}, 1, 1, 3, 2);
  const TensorField2D once = support_agent(s, m);
  const TensorField2D twice = support_agent(once, m);
  for (auto k : kComponents) EXPECT_TRUE(once[k] == twice[k]);
  EXPECT_THROW(support_agent(s, ShapeMask({6, 5})), ShapeError);
}

}  // namespace
}  // namespace monstr
