#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "monstr/agents.hpp"
#include "monstr/core.hpp"
#include "monstr/elasticity.hpp"
#include "monstr/projector.hpp"

namespace monstr {

struct MaceOptions {
  int max_iters = 50;
  bool enable_equilibrium = true;
};

struct MaceState {
  TensorField2D sigma;
  VirtualSinogramTensor u;
  int iteration = 0;
  /// Consensus NRMSE between p~ and Proj(sigma), one entry per iteration.
  std::vector<double> trace;
  /// Cumulative wall-clock seconds at the end of each iteration.
  std::vector<double> wall_seconds;
  /// Measurement scale the loop ran at; sigma and u are stored in those
  /// normalized units.
  double data_scale = 1.0;
  /// The qGGMRF sigma_x actually used, in normalized units.
  double sigma_x = 0.0;
};

struct MaceResult {
  TensorField2D strain;
  MaceState state;
};

/// Proj(sigma) = (A s_xx, A s_yy, A s_xy).
VirtualSinogramTensor project_tensor(const Projector& projector, const TensorField2D& sigma);

/// |p~ - Proj(sigma)| / |p~| over all components, restricted to rays where
/// `valid` is nonzero (every ray if `valid` is null). Returns NaN when |p~| is
/// zero.
double consensus_nrmse(const VirtualSinogramTensor& p_tilde, const VirtualSinogramTensor& proj_sigma,
                       const Sinogram* valid = nullptr);

inline bool nrmse_defined(double v) { return !std::isnan(v); }

/// Root-mean-square of the average strain y/L over valid rays; 1 when that is
/// zero. The consensus loop divides the measurements by this value.
double measurement_scale(const StrainSinogram& sinogram);

/// Data-derived qGGMRF scale in normalized stress units: twice the RMS over
/// the mask of the ray-averaged strain seen by each pixel, (A^T y)/(A^T L),
/// mapped to stress with the hydrostatic modulus E / (1 - nu).
double auto_sigma_x(const Projector& projector, const StrainSinogram& normalized,
                    const ShapeMask& mask, const ElasticityModel& model);

using IterationCallback = std::function<void(const MaceState&)>;

/// The consensus loop. Each iteration runs
///   p~ <- F_d(Proj(sigma) - u); sigma <- F_r(p~ + u); sigma <- F_e(sigma)
///   (when enabled); sigma <- F_s(sigma); u <- u + p~ - Proj(sigma)
/// from sigma = 0, u = 0, and the result is eps = C^-1 sigma. u stays zero on
/// invalid rays. Throws DivergenceError on non-finite state or once |sigma|
/// exceeds 1e8 in normalized units.
MaceResult run_monstr(const StrainSinogram& sinogram, const ShapeMask& mask,
                      const ElasticityModel& model, const AgentParams& params,
                      const MaceOptions& options, const Projector& projector,
                      const IterationCallback& on_iteration = {});

/// Builds a projector for the sinogram geometry and runs the loop.
MaceResult run_monstr(const StrainSinogram& sinogram, const ShapeMask& mask,
                      const ElasticityModel& model, const AgentParams& params,
                      const MaceOptions& options);

}  // namespace monstr
