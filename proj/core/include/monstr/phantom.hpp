#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "monstr/core.hpp"
#include "monstr/elasticity.hpp"

namespace monstr {

/// Which transverse strain carries the -nu eps_xx term.
///
/// `equilibrated` is the classical end-loaded cantilever: eps_yy = -nu eps_xx
/// and the shear term is parabolic in y. Its plane-stress stress field has
/// zero divergence and traction-free top and bottom faces.
///
/// `as_printed` swaps the two (eps_xy = -nu eps_xx, parabolic eps_yy). That
/// form is not in equilibrium, so an equilibrium-constrained reconstruction
/// cannot recover it.
enum class BeamLayout { equilibrated, as_printed };

std::string_view layout_name(BeamLayout layout);
/// Throws ConfigError for anything but "equilibrated" or "as_printed".
BeamLayout parse_layout(std::string_view name);

/// End-loaded cantilever in plane stress. The beam is an axis-aligned
/// rectangle centered in the grid with its long side along x.
struct BeamPhantomParams {
  double length = 91.0;  // l, pixels along x
  double width = 45.0;   // h, pixels along y
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.3;
  double peak_strain_microstrain = 300.0;
  BeamLayout layout = BeamLayout::equilibrated;

  double second_moment() const noexcept { return width * width * width / 12.0; }
  /// Load P giving max |eps_xx| = peak strain: P = peak * E I / (l h / 2).
  double load() const noexcept;
};

struct BeamPhantom {
  TensorField2D strain;
  ShapeMask mask;
  double load = 0.0;
  /// Pixel extent of the beam: rows [row0, row0 + rows), cols [col0, col0 + cols).
  std::size_t row0 = 0, col0 = 0, rows = 0, cols = 0;
};

/// Saint-Venant strain at beam-local coordinates (x along the beam from the
/// fixed end, y across it from the neutral axis). With a = P / EI,
///   eps_xx = a (l - x) y
///   s      = -((1 + nu) a / 2) ((h/2)^2 - y^2)
///   t      = -nu eps_xx
/// and (eps_yy, eps_xy) = (t, s) for the equilibrated layout, (s, t) for the
/// as-printed one.
Vector3 saint_venant_strain(const BeamPhantomParams& params, double x, double y);

/// Samples saint_venant_strain on the beam's pixels. The beam covers
/// round(l) x round(h) pixels; the first and last pixel centers along each
/// axis sit on the beam ends (x = 0, x = l, y = -h/2, y = h/2) with uniform
/// spacing in between. Zero outside the mask. Throws ConfigError if the beam
/// does not fit.
BeamPhantom cantilever_strain(const BeamPhantomParams& params, Shape2D grid);

/// One reconstruction run of the simulated study.
struct ExperimentSpec {
  std::string name;
  std::size_t views = 0;           // views kept from the full sinogram
  double noise_microstrain = 0.0;  // Gaussian std added to <eps>
  std::uint64_t seed = 0;
  bool enable_equilibrium = true;
  /// Detector and reconstruction strengths replacing the agents defaults.
  std::optional<double> alpha_y;
  std::optional<double> alpha_v;
};

struct ExperimentSettings {
  std::size_t sparse_views = 10;
  double noise_microstrain = 10.0;
  std::uint64_t seed = 20250101;
  /// The noisy run cannot be fitted exactly, so it uses a looser detector and
  /// a stronger prior.
  double noisy_alpha_y = 0.3;
  double noisy_alpha_v = 300.0;
};

/// baseline-50, monstr-50, monstr-10 and monstr-50-noisy for a scan with
/// `full_views` views.
std::vector<ExperimentSpec> reference_experiments(std::size_t full_views = 50,
                                                  const ExperimentSettings& settings = {});

}  // namespace monstr
