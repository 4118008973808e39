#include "monstr/mace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "monstr/forward_model.hpp"

namespace monstr {
namespace {

// Normalized measurements are O(1), so stress this large only comes from a
// loop that is blowing up.
constexpr double kDivergenceBound = 1e8;

double max_abs(const TensorField2D& t) {
  double m = 0.0;
  for (const auto& c : t.c)
    for (double v : c.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

VirtualSinogramTensor project_tensor(const Projector& projector, const TensorField2D& sigma) {
  VirtualSinogramTensor out;
  for (auto k : kComponents) out[k] = projector.project(sigma[k]);
  return out;
}

double consensus_nrmse(const VirtualSinogramTensor& p_tilde, const VirtualSinogramTensor& proj_sigma,
                       const Sinogram* valid) {
  double num = 0.0;
  double den = 0.0;
  for (auto k : kComponents) {
    require_shape(p_tilde[k].shape(), proj_sigma[k].shape(), "consensus_nrmse");
    for (std::size_t i = 0; i < p_tilde[k].size(); ++i) {
      if (valid && (*valid)[i] == 0.0) continue;
      const double d = p_tilde[k][i] - proj_sigma[k][i];
      num += d * d;
      den += p_tilde[k][i] * p_tilde[k][i];
    }
  }
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(num / den);
}

double measurement_scale(const StrainSinogram& s) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    if (s.valid[i] == 0.0) continue;
    const double e = s.y[i] / s.path_lengths[i];
    acc += e * e;
    ++n;
  }
  if (n == 0 || acc == 0.0) return 1.0;
  return std::sqrt(acc / static_cast<double>(n));
}

double auto_sigma_x(const Projector& projector, const StrainSinogram& s, const ShapeMask& mask,
                    const ElasticityModel& model) {
  const ScalarField by = projector.backproject(s.y);
  const ScalarField bl = projector.backproject(s.path_lengths);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < by.size(); ++j) {
    if (mask[j] == 0.0 || !(bl[j] > 0.0)) continue;
    const double e = by[j] / bl[j];
    acc += e * e;
    ++n;
  }
  if (n == 0 || acc == 0.0) return 1.0;
  const double hydrostatic = model.youngs_modulus() / (1.0 - model.poisson_ratio());
  return 2.0 * hydrostatic * std::sqrt(acc / static_cast<double>(n));
}

MaceResult run_monstr(const StrainSinogram& sinogram, const ShapeMask& mask,
                      const ElasticityModel& model, const AgentParams& params,
                      const MaceOptions& options, const Projector& projector,
                      const IterationCallback& on_iteration) {
  sinogram.validate();
  params.validate();
  if (options.max_iters < 1) throw ConfigError("mace.max_iters must be >= 1");
  if (!(projector.geometry() == sinogram.geometry)) {
    throw ShapeError("projector geometry does not match the sinogram geometry");
  }
  require_shape(sinogram.geometry.grid(), mask.shape(), "shape mask vs sinogram grid");

  const auto start = std::chrono::steady_clock::now();

  MaceState state;
  state.data_scale = measurement_scale(sinogram);
  StrainSinogram data = sinogram;
  for (auto& v : data.y.values()) v /= state.data_scale;

  QggmrfParams prior = params.qggmrf;
  if (!(prior.sigma_x > 0.0)) prior.sigma_x = auto_sigma_x(projector, data, mask, model);
  state.sigma_x = prior.sigma_x;

  const RayWeights weights = compute_weights(sinogram.geometry, model);
  const ReconstructionAgent reconstruct(projector, sinogram.valid, params.alpha_v, prior,
                                        params.recon_inner_iters, mask);
  const EquilibriumAgent equilibrate(params.alpha_e, params.equil_sweeps, params.cg_tol, mask);

  const Shape2D grid = sinogram.geometry.grid();
  const Shape2D sino = sinogram.geometry.sinogram();
  state.sigma = TensorField2D(grid);
  state.u = VirtualSinogramTensor(sino);
  VirtualSinogramTensor proj_sigma(sino);

  for (int it = 0; it < options.max_iters; ++it) {
    VirtualSinogramTensor v = proj_sigma;
    for (auto k : kComponents)
      for (std::size_t i = 0; i < v[k].size(); ++i) v[k][i] -= state.u[k][i];
    const VirtualSinogramTensor p_tilde = detector_agent(v, data, weights, params.alpha_y);

    VirtualSinogramTensor target = p_tilde;
    for (auto k : kComponents)
      for (std::size_t i = 0; i < target[k].size(); ++i) target[k][i] += state.u[k][i];
    state.sigma = reconstruct(target, state.sigma);
    if (options.enable_equilibrium) state.sigma = equilibrate(state.sigma);
    state.sigma = support_agent(state.sigma, mask);

    proj_sigma = project_tensor(projector, state.sigma);
    for (auto k : kComponents) {
      for (std::size_t i = 0; i < sino.size(); ++i) {
        if (data.valid[i] == 0.0) continue;
        state.u[k][i] += p_tilde[k][i] - proj_sigma[k][i];
      }
    }

    state.iteration = it + 1;
    state.trace.push_back(consensus_nrmse(p_tilde, proj_sigma, &data.valid));
    state.wall_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (on_iteration) on_iteration(state);
    if (!state.sigma.all_finite() || !state.u.all_finite()) {
      throw DivergenceError("consensus loop produced non-finite values at iteration " +
                                std::to_string(state.iteration),
                            state.iteration);
    }
    if (max_abs(state.sigma) > kDivergenceBound) {
      throw DivergenceError("consensus loop diverged: |sigma| exceeds 1e8 (normalized) at iteration " +
                                std::to_string(state.iteration),
                            state.iteration);
    }
  }

  MaceResult result;
  result.strain = stress_to_strain(state.sigma, model);
  for (auto& c : result.strain.c)
    for (auto& v : c.values()) v *= state.data_scale;
  result.state = std::move(state);
  return result;
}

MaceResult run_monstr(const StrainSinogram& sinogram, const ShapeMask& mask,
                      const ElasticityModel& model, const AgentParams& params,
                      const MaceOptions& options) {
  const Projector projector(sinogram.geometry);
  return run_monstr(sinogram, mask, model, params, options, projector);
}

}  // namespace monstr
