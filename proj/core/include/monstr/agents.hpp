#pragma once

#include <array>
#include <optional>
#include <vector>

#include "monstr/core.hpp"
#include "monstr/elasticity.hpp"
#include "monstr/forward_model.hpp"
#include "monstr/linalg.hpp"
#include "monstr/projector.hpp"

namespace monstr {

/// q-generalized Gaussian MRF prior parameters. sigma_x <= 0 asks the caller
/// to pick a data-derived value (see run_monstr).
struct QggmrfParams {
  double q = 1.2;
  double p = 2.0;
  double T = 1.0;
  double sigma_x = 0.0;
};

struct AgentParams {
  // Strengths are in the loop's normalized units (see run_monstr).
  double alpha_y = 0.01;
  double alpha_v = 30.0;
  double alpha_e = 0.15;
  QggmrfParams qggmrf;
  int recon_inner_iters = 10;
  int equil_sweeps = 3;
  double cg_tol = 1e-10;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Detector agent

/// Minimizer over p of (1/(2 alpha^2)) (y - w.p)^2 + |p - p0|^2.
///
/// The minimizer moves p0 along w:
///   p = p0 + w (y - w.p0) / (2 alpha^2 + |w|^2).
Vector3 detector_prox(const Vector3& p0, double y, const Vector3& w_tilde, double alpha_y);

/// Applies detector_prox to every valid ray; invalid rays pass through.
VirtualSinogramTensor detector_agent(const VirtualSinogramTensor& p0,
                                     const StrainSinogram& measurements,
                                     const RayWeights& weights, double alpha_y);

// ---------------------------------------------------------------------------
// Reconstruction agent

struct Neighbor {
  int dr;
  int dc;
  double weight;
};

/// 8-neighborhood, edge neighbors weighted 1 and diagonals 1/sqrt(2), scaled
/// to sum to one.
const std::array<Neighbor, 8>& neighborhood();

class QggmrfPrior {
 public:
  /// Requires 1 < q <= p = 2, T > 0, sigma_x > 0.
  explicit QggmrfPrior(const QggmrfParams& params);

  const QggmrfParams& params() const noexcept { return params_; }

  /// rho(delta) = |delta|^p / (p sigma^p) * u / (1 + u), u = |delta/(T sigma)|^(q-p).
  double potential(double delta) const;
  /// rho'(delta) / (2 delta), the quadratic majorizer coefficient.
  double surrogate_coefficient(double delta) const;
  /// Sum of b_sr rho(x_s - x_r) over all unordered neighbor pairs; with a
  /// region, only pairs whose two pixels both lie inside it.
  double value(const ScalarField& x, const ShapeMask* region = nullptr) const;

 private:
  QggmrfParams params_;
};

/// Per-component MAP reconstruction
///   argmin_x (1/(2 alpha_v^2)) |target - A x|_W^2 + g(x)
/// by iterative coordinate descent with the qGGMRF surrogate. W is 1 on valid
/// rays and 0 elsewhere. Every coordinate update lowers the objective.
///
/// With a region, only pixels inside it are unknowns (the rest keep their
/// warm-start values) and prior cliques leaving the region are dropped.
class ReconstructionAgent {
 public:
  ReconstructionAgent(const Projector& projector, Sinogram ray_weights, double alpha_v,
                      const QggmrfParams& prior, int inner_iters,
                      std::optional<ShapeMask> region = std::nullopt);

  ScalarField reconstruct(const Sinogram& target, ScalarField warm_start,
                          std::vector<double>* objective_trace = nullptr) const;

  /// Reconstructs xx, yy, xy independently, each warm-started from `warm`.
  TensorField2D operator()(const VirtualSinogramTensor& target, const TensorField2D& warm) const;

  double objective(const Sinogram& target, const ScalarField& x) const;

  const QggmrfPrior& prior() const noexcept { return prior_; }

 private:
  void sweep(std::span<double> x, std::span<double> error, Shape2D grid) const;

  const Projector& projector_;
  Sinogram ray_weights_;
  double inv_var_;
  QggmrfPrior prior_;
  int inner_iters_;
  std::optional<ShapeMask> region_;
  std::vector<double> curvature_;
};

// ---------------------------------------------------------------------------
// Equilibrium agent

/// Forward differences with unit spacing; the last column (row) is zero.
/// With a region, a difference is kept only when both of its pixels are
/// inside; the others are zero.
ScalarField diff_x(const ScalarField& f, const ShapeMask* region = nullptr);
ScalarField diff_y(const ScalarField& f, const ShapeMask* region = nullptr);
ScalarField diff_x_adjoint(const ScalarField& g, const ShapeMask* region = nullptr);
ScalarField diff_y_adjoint(const ScalarField& g, const ShapeMask* region = nullptr);

/// D(sigma) = (Dx s_xx + Dy s_xy, Dy s_yy + Dx s_xy).
std::array<ScalarField, 2> equilibrium_residual(const TensorField2D& stress,
                                                const ShapeMask* region = nullptr);
double equilibrium_norm(const TensorField2D& stress, const ShapeMask* region = nullptr);

/// Soft equilibrium prox
///   argmin_s (1/(2 alpha_e^2)) |D(s)|^2 + |s - s0|^2
/// by block coordinate descent: per-row tridiagonal solves for xx,
/// per-column tridiagonal solves for yy and conjugate gradient for xy.
///
/// Without a region D spans the whole grid, so jumps at the sample edge count
/// as imbalance. With a region only differences inside it count, which leaves
/// the edge tractions free.
class EquilibriumAgent {
 public:
  EquilibriumAgent(double alpha_e, int sweeps, double cg_tol,
                   std::optional<ShapeMask> region = std::nullopt);

  TensorField2D operator()(const TensorField2D& initial) const;

  /// Exact minimization over one block with the other two held fixed.
  void update_xx(TensorField2D& s, const TensorField2D& s0) const;
  void update_yy(TensorField2D& s, const TensorField2D& s0) const;
  CgResult update_xy(TensorField2D& s, const TensorField2D& s0) const;

  double objective(const TensorField2D& s, const TensorField2D& s0) const;
  /// Gradient of the objective with respect to block k.
  ScalarField block_gradient(const TensorField2D& s, const TensorField2D& s0, Component k) const;

  double cg_abs_tolerance(const TensorField2D& s0) const;

  const ShapeMask* region() const noexcept { return region_ ? &*region_ : nullptr; }

 private:
  double kappa_;  // 1 / alpha_e^2
  int sweeps_;
  double cg_tol_;
  std::optional<ShapeMask> region_;
};

TensorField2D equilibrium_agent(const TensorField2D& initial, double alpha_e, int sweeps,
                                double cg_tol, const ShapeMask* region = nullptr);

// ---------------------------------------------------------------------------
// Support agent

/// Multiplies every component by the binary mask.
TensorField2D support_agent(const TensorField2D& stress, const ShapeMask& mask);

}  // namespace monstr
