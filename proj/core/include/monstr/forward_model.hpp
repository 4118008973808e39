#pragma once

#include <cstdint>
#include <vector>

#include "monstr/core.hpp"
#include "monstr/elasticity.hpp"
#include "monstr/projector.hpp"

namespace monstr {

/// Longitudinal-ray-transform weights, one row per ray (rays ordered as in
/// Projector). `w` maps the strain virtual sinograms to a measurement,
/// `w_tilde` = w C^-1 maps the stress virtual sinograms to the same value.
struct RayWeights {
  std::vector<Vector3> w;
  std::vector<Vector3> w_tilde;
};

/// Row for a single angle: [cos^2, sin^2, sin 2theta].
Vector3 direction_weights(double theta);

RayWeights compute_weights(const Geometry& geometry, const ElasticityModel& model);

/// y_i = w_i . (A eps_xx, A eps_yy, A eps_xy)_i, with eps masked to the sample
/// first, L = A m, and rays with L <= kMinPathLength marked invalid.
StrainSinogram synthesize_strain_sinogram(const TensorField2D& strain, const ShapeMask& mask,
                                          const Projector& projector);

/// Adds i.i.d. Gaussian noise of `sigma_microstrain` (in microstrain) to the
/// average strain of every valid ray, i.e. sigma * 1e-6 * L_i to y_i.
StrainSinogram add_noise(const StrainSinogram& sinogram, double sigma_microstrain,
                         std::uint64_t seed);

/// View indices kept by subsample_views: floor(k * num_views / keep).
std::vector<std::size_t> subsample_indices(std::size_t num_views, std::size_t keep);

/// Keeps `keep` views spread uniformly by index, starting with view 0.
StrainSinogram subsample_views(const StrainSinogram& sinogram, std::size_t keep);

}  // namespace monstr
