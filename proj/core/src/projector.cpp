#include "monstr/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace monstr {
namespace {

// Direction components smaller than this are treated as exactly zero, so
// rays at 0 and pi/2 travel parallel to the grid lines.
constexpr double kParallelEps = 1e-12;
// Segments shorter than this come from coincident grid crossings.
constexpr double kMinSegment = 1e-12;

}  // namespace

std::vector<MatrixEntry> trace_ray(const Geometry& g, std::size_t view, std::size_t detector_col) {
  const double theta = g.angles[view];
  double dx = std::cos(theta);
  double dy = std::sin(theta);
  if (std::abs(dx) < kParallelEps) dx = 0.0;
  if (std::abs(dy) < kParallelEps) dy = 0.0;

  const double t = (static_cast<double>(detector_col) -
                    0.5 * static_cast<double>(g.num_detector_cols - 1)) * g.pixel_pitch();
  // Point on the ray closest to the grid center.
  const double px = -t * std::sin(theta);
  const double py = t * std::cos(theta);

  const double xmin = -0.5 * static_cast<double>(g.grid_cols);
  const double ymin = -0.5 * static_cast<double>(g.grid_rows);
  const double xmax = -xmin;
  const double ymax = -ymin;

  double s_in = -std::numeric_limits<double>::infinity();
  double s_out = std::numeric_limits<double>::infinity();
  if (dx != 0.0) {
    const double a = (xmin - px) / dx;
    const double b = (xmax - px) / dx;
    s_in = std::max(s_in, std::min(a, b));
    s_out = std::min(s_out, std::max(a, b));
  } else if (px <= xmin || px >= xmax) {
    return {};
  }
  if (dy != 0.0) {
    const double a = (ymin - py) / dy;
    const double b = (ymax - py) / dy;
    s_in = std::max(s_in, std::min(a, b));
    s_out = std::min(s_out, std::max(a, b));
  } else if (py <= ymin || py >= ymax) {
    return {};
  }
  if (!(s_out > s_in)) return {};

  std::vector<double> crossings{s_in, s_out};
  crossings.reserve(g.grid_cols + g.grid_rows + 4);
  if (dx != 0.0) {
    for (std::size_t k = 1; k < g.grid_cols; ++k) {
      const double s = (xmin + static_cast<double>(k) - px) / dx;
      if (s > s_in && s < s_out) crossings.push_back(s);
    }
  }
  if (dy != 0.0) {
    for (std::size_t k = 1; k < g.grid_rows; ++k) {
      const double s = (ymin + static_cast<double>(k) - py) / dy;
      if (s > s_in && s < s_out) crossings.push_back(s);
    }
  }
  std::sort(crossings.begin(), crossings.end());

  std::vector<MatrixEntry> entries;
  entries.reserve(crossings.size());
  const auto last_col = static_cast<long>(g.grid_cols) - 1;
  const auto last_row = static_cast<long>(g.grid_rows) - 1;
  for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
    const double len = crossings[k + 1] - crossings[k];
    if (len <= kMinSegment) continue;
    const double mid = 0.5 * (crossings[k] + crossings[k + 1]);
    const long col = std::clamp(static_cast<long>(std::floor(px + mid * dx - xmin)), 0L, last_col);
    const long row = std::clamp(static_cast<long>(std::floor(py + mid * dy - ymin)), 0L, last_row);
    const auto pixel = static_cast<std::uint32_t>(row * static_cast<long>(g.grid_cols) + col);
    if (!entries.empty() && entries.back().index == pixel) {
      entries.back().length += len;
    } else {
      entries.push_back({pixel, len});
    }
  }
  return entries;
}

Projector::Projector(Geometry geometry) : geometry_(std::move(geometry)) {
  geometry_.validate();
  const std::size_t num_rays = geometry_.num_rays();
  const std::size_t num_pixels = geometry_.grid().size();

  std::vector<std::vector<MatrixEntry>> per_ray(num_rays);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < num_rays; ++i) {
    per_ray[i] = trace_ray(geometry_, i / geometry_.num_detector_cols,
                           i % geometry_.num_detector_cols);
  }

  ray_offsets_.assign(num_rays + 1, 0);
  for (std::size_t i = 0; i < num_rays; ++i) {
    ray_offsets_[i + 1] = ray_offsets_[i] + per_ray[i].size();
  }
  ray_entries_.reserve(ray_offsets_.back());
  for (auto& entries : per_ray) {
    ray_entries_.insert(ray_entries_.end(), entries.begin(), entries.end());
  }

  // Transpose by counting sort; each pixel's rays end up in increasing order.
  pixel_offsets_.assign(num_pixels + 1, 0);
  for (const auto& e : ray_entries_) ++pixel_offsets_[e.index + 1];
  for (std::size_t j = 0; j < num_pixels; ++j) pixel_offsets_[j + 1] += pixel_offsets_[j];
  pixel_entries_.resize(ray_entries_.size());
  std::vector<std::size_t> cursor(pixel_offsets_.begin(), pixel_offsets_.end() - 1);
  for (std::size_t i = 0; i < num_rays; ++i) {
    for (std::size_t k = ray_offsets_[i]; k < ray_offsets_[i + 1]; ++k) {
      const auto& e = ray_entries_[k];
      pixel_entries_[cursor[e.index]++] = {static_cast<std::uint32_t>(i), e.length};
    }
  }
}

void Projector::project(std::span<const double> f, std::span<double> out) const {
  if (f.size() != geometry_.grid().size() || out.size() != geometry_.num_rays()) {
    throw ShapeError("project: buffer sizes do not match the projector geometry");
  }
  const std::size_t num_rays = out.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < num_rays; ++i) {
    double acc = 0.0;
    for (std::size_t k = ray_offsets_[i]; k < ray_offsets_[i + 1]; ++k) {
      acc += ray_entries_[k].length * f[ray_entries_[k].index];
    }
    out[i] = acc;
  }
}

void Projector::backproject(std::span<const double> s, std::span<double> out) const {
  if (s.size() != geometry_.num_rays() || out.size() != geometry_.grid().size()) {
    throw ShapeError("backproject: buffer sizes do not match the projector geometry");
  }
  const std::size_t num_pixels = out.size();
#pragma omp parallel for schedule(static)
  for (std::size_t j = 0; j < num_pixels; ++j) {
    double acc = 0.0;
    for (std::size_t k = pixel_offsets_[j]; k < pixel_offsets_[j + 1]; ++k) {
      acc += pixel_entries_[k].length * s[pixel_entries_[k].index];
    }
    out[j] = acc;
  }
}

Sinogram Projector::project(const ScalarField& f) const {
  require_shape(geometry_.grid(), f.shape(), "project: field");
  Sinogram out(geometry_.sinogram());
  project(f.values(), out.values());
  return out;
}

ScalarField Projector::backproject(const Sinogram& s) const {
  require_shape(geometry_.sinogram(), s.shape(), "backproject: sinogram");
  ScalarField out(geometry_.grid());
  backproject(s.values(), out.values());
  return out;
}

Sinogram Projector::path_lengths(const ShapeMask& mask) const {
  require_shape(geometry_.grid(), mask.shape(), "path_lengths: mask");
  Sinogram out(geometry_.sinogram());
  project(mask.values(), out.values());
  return out;
}

std::span<const MatrixEntry> Projector::ray(std::size_t i) const {
  return {ray_entries_.data() + ray_offsets_[i], ray_offsets_[i + 1] - ray_offsets_[i]};
}

std::span<const MatrixEntry> Projector::pixel(std::size_t j) const {
  return {pixel_entries_.data() + pixel_offsets_[j], pixel_offsets_[j + 1] - pixel_offsets_[j]};
}

}  // namespace monstr
