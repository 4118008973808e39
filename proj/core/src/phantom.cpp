#include "monstr/phantom.hpp"

#include <cmath>

namespace monstr {

std::string_view layout_name(BeamLayout layout) {
  return layout == BeamLayout::equilibrated ? "equilibrated" : "as_printed";
}

BeamLayout parse_layout(std::string_view name) {
  if (name == "equilibrated") return BeamLayout::equilibrated;
  if (name == "as_printed") return BeamLayout::as_printed;
  throw ConfigError("unknown beam layout '" + std::string(name) +
                    "' (expected equilibrated or as_printed)");
}

double BeamPhantomParams::load() const noexcept {
  return peak_strain_microstrain * kMicrostrain * youngs_modulus * second_moment() /
         (length * width / 2.0);
}

Vector3 saint_venant_strain(const BeamPhantomParams& bp, double x, double y) {
  const double a = bp.load() / (bp.youngs_modulus * bp.second_moment());
  const double half = bp.width / 2.0;
  const double exx = a * (bp.length - x) * y;
  const double parabolic = -(1.0 + bp.poisson_ratio) * a / 2.0 * (half * half - y * y);
  const double lateral = -bp.poisson_ratio * exx;
  if (bp.layout == BeamLayout::as_printed) return {exx, parabolic, lateral};
  return {exx, lateral, parabolic};
}

BeamPhantom cantilever_strain(const BeamPhantomParams& bp, Shape2D grid) {
  if (!(bp.length >= 2.0) || !(bp.width >= 2.0)) {
    throw ConfigError("phantom.length and phantom.width must be at least 2 pixels");
  }
  if (!(bp.youngs_modulus > 0.0)) throw ConfigError("phantom Young's modulus must be positive");
  const auto cols = static_cast<std::size_t>(std::lround(bp.length));
  const auto rows = static_cast<std::size_t>(std::lround(bp.width));
  if (cols > grid.cols || rows > grid.rows) {
    throw ConfigError("beam of " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " pixels does not fit a " + to_string(grid) + " grid");
  }

  BeamPhantom out;
  out.rows = rows;
  out.cols = cols;
  out.row0 = (grid.rows - rows) / 2;
  out.col0 = (grid.cols - cols) / 2;
  out.load = bp.load();
  out.strain = TensorField2D(grid);
  out.mask = ShapeMask(grid);

  // Row offsets are taken from the middle row so that y is exactly odd in
  // the row index about the neutral axis.
  const double mid = static_cast<double>(rows - 1) / 2.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = (static_cast<double>(r) - mid) * bp.width / static_cast<double>(rows - 1);
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = static_cast<double>(c) * bp.length / static_cast<double>(cols - 1);
      const Vector3 e = saint_venant_strain(bp, x, y);
      const std::size_t gr = out.row0 + r;
      const std::size_t gc = out.col0 + c;
      out.mask.set(gr, gc, true);
      out.strain.xx()(gr, gc) = e[0];
      out.strain.yy()(gr, gc) = e[1];
      out.strain.xy()(gr, gc) = e[2];
    }
  }
  return out;
}

std::vector<ExperimentSpec> reference_experiments(std::size_t full_views,
                                                  const ExperimentSettings& settings) {
  const std::string full = std::to_string(full_views);
  const std::string sparse = std::to_string(settings.sparse_views);
  return {
      {"baseline-" + full, full_views, 0.0, settings.seed, false, {}, {}},
      {"monstr-" + full, full_views, 0.0, settings.seed, true, {}, {}},
      {"monstr-" + sparse, settings.sparse_views, 0.0, settings.seed, true, {}, {}},
      {"monstr-" + full + "-noisy", full_views, settings.noise_microstrain, settings.seed, true,
       settings.noisy_alpha_y, settings.noisy_alpha_v},
  };
}

}  // namespace monstr
