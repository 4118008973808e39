#include "monstr/forward_model.hpp"

#include <cmath>
#include <random>

namespace monstr {

Vector3 direction_weights(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * c, s * s, 2.0 * s * c};
}

RayWeights compute_weights(const Geometry& geometry, const ElasticityModel& model) {
  RayWeights rw;
  rw.w.reserve(geometry.num_rays());
  rw.w_tilde.reserve(geometry.num_rays());
  for (std::size_t v = 0; v < geometry.num_views; ++v) {
    const Vector3 w = direction_weights(geometry.angles[v]);
    const Vector3 wt = w * model.compliance();
    for (std::size_t c = 0; c < geometry.num_detector_cols; ++c) {
      rw.w.push_back(w);
      rw.w_tilde.push_back(wt);
    }
  }
  return rw;
}

StrainSinogram synthesize_strain_sinogram(const TensorField2D& strain, const ShapeMask& mask,
                                          const Projector& projector) {
  const Geometry& g = projector.geometry();
  require_shape(g.grid(), strain.shape(), "synthesize: strain field");
  require_shape(g.grid(), mask.shape(), "synthesize: mask");
  if (!strain.all_finite()) throw FormatError("synthesize: strain field is not finite");

  VirtualSinogramTensor p;
  for (auto k : kComponents) {
    ScalarField masked = strain[k];
    for (std::size_t j = 0; j < masked.size(); ++j) masked[j] *= mask[j];
    p[k] = projector.project(masked);
  }

  Sinogram y(g.sinogram());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Vector3 w = direction_weights(g.angles[i / g.num_detector_cols]);
    y[i] = w[0] * p.xx()[i] + w[1] * p.yy()[i] + w[2] * p.xy()[i];
  }
  return make_strain_sinogram(g, std::move(y), projector.path_lengths(mask));
}

StrainSinogram add_noise(const StrainSinogram& sinogram, double sigma_microstrain,
                         std::uint64_t seed) {
  if (!(sigma_microstrain >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  StrainSinogram out = sinogram;
  if (sigma_microstrain == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma_microstrain * kMicrostrain);
  for (std::size_t i = 0; i < out.y.size(); ++i) {
    if (out.valid[i] == 0.0) continue;
    out.y[i] += normal(rng) * out.path_lengths[i];
  }
  return out;
}

std::vector<std::size_t> subsample_indices(std::size_t num_views, std::size_t keep) {
  if (keep < 1 || keep > num_views) {
    throw ConfigError("cannot keep " + std::to_string(keep) + " of " + std::to_string(num_views) +
                      " views");
  }
  std::vector<std::size_t> idx(keep);
  for (std::size_t k = 0; k < keep; ++k) idx[k] = k * num_views / keep;
  return idx;
}

StrainSinogram subsample_views(const StrainSinogram& s, std::size_t keep) {
  const auto idx = subsample_indices(s.geometry.num_views, keep);
  const std::size_t cols = s.geometry.num_detector_cols;

  StrainSinogram out;
  out.geometry = s.geometry;
  out.geometry.num_views = keep;
  out.geometry.angles.clear();
  out.y = Sinogram(Shape2D{keep, cols});
  out.path_lengths = Sinogram(Shape2D{keep, cols});
  out.valid = Sinogram(Shape2D{keep, cols});
  for (std::size_t k = 0; k < keep; ++k) {
    out.geometry.angles.push_back(s.geometry.angles[idx[k]]);
    for (std::size_t c = 0; c < cols; ++c) {
      out.y(k, c) = s.y(idx[k], c);
      out.path_lengths(k, c) = s.path_lengths(idx[k], c);
      out.valid(k, c) = s.valid(idx[k], c);
    }
  }
  return out;
}

}  // namespace monstr
