#include "monstr/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace monstr {

std::string to_string(Shape2D shape) {
  return std::to_string(shape.rows) + "x" + std::to_string(shape.cols);
}

Geometry Geometry::uniform(std::size_t rows, std::size_t cols, std::size_t views,
                           std::size_t detector_cols) {
  Geometry g;
  g.grid_rows = rows;
  g.grid_cols = cols;
  g.num_views = views;
  g.num_detector_cols = detector_cols;
  g.angles.resize(views);
  for (std::size_t v = 0; v < views; ++v) {
    g.angles[v] = std::numbers::pi * static_cast<double>(v) / static_cast<double>(views);
  }
  return g;
}

Geometry Geometry::reference() { return uniform(128, 128, 50, 128); }

void Geometry::validate() const {
  if (grid_rows == 0 || grid_cols == 0 || num_views == 0 || num_detector_cols == 0) {
    throw ShapeError("geometry has an empty dimension");
  }
  if (angles.size() != num_views) {
    throw ShapeError("geometry lists " + std::to_string(angles.size()) + " angles for " +
                     std::to_string(num_views) + " views");
  }
  for (std::size_t v = 0; v < angles.size(); ++v) {
    const double a = angles[v];
    if (!std::isfinite(a) || a < 0.0 || a >= std::numbers::pi) {
      throw ShapeError("view angle " + std::to_string(v) + " outside [0, pi)");
    }
    if (v > 0 && !(a > angles[v - 1])) {
      throw ShapeError("view angles are not strictly increasing");
    }
  }
}

Array2D::Array2D(Shape2D shape, std::vector<double> values)
    : shape_(shape), data_(std::move(values)) {
  if (data_.size() != shape_.size()) {
    throw ShapeError("array of " + to_string(shape_) + " given " + std::to_string(data_.size()) +
                     " values");
  }
}

void Array2D::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Array2D::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ShapeMask::ShapeMask(Array2D values) : Array2D(std::move(values)) {
  for (double v : this->values()) {
    if (v != 0.0 && v != 1.0) throw FormatError("shape mask is not binary");
  }
}

std::size_t ShapeMask::count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values().begin(), values().end(), [](double v) { return v != 0.0; }));
}

const char* component_name(Component k) noexcept {
  switch (k) {
    case Component::xx: return "xx";
    case Component::yy: return "yy";
    case Component::xy: return "xy";
  }
  return "?";
}

Sinogram StrainSinogram::average_strain() const {
  Sinogram out(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (valid[i] != 0.0) out[i] = y[i] / path_lengths[i];
  }
  return out;
}

std::size_t StrainSinogram::num_valid() const {
  return static_cast<std::size_t>(std::count_if(valid.values().begin(), valid.values().end(),
                                                [](double v) { return v != 0.0; }));
}

void StrainSinogram::validate() const {
  geometry.validate();
  require_shape(geometry.sinogram(), y.shape(), "strain sinogram measurements");
  require_shape(geometry.sinogram(), path_lengths.shape(), "strain sinogram path lengths");
  require_shape(geometry.sinogram(), valid.shape(), "strain sinogram validity mask");
  if (!y.all_finite() || !path_lengths.all_finite()) {
    throw FormatError("strain sinogram contains non-finite values");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double L = path_lengths[i];
    if (L < 0.0) throw FormatError("negative path length in strain sinogram");
    const bool expect_valid = L > kMinPathLength;
    if (valid[i] != (expect_valid ? 1.0 : 0.0)) {
      throw FormatError("validity mask disagrees with path lengths at ray " + std::to_string(i));
    }
    if (!expect_valid && y[i] != 0.0) {
      throw FormatError("nonzero measurement on invalid ray " + std::to_string(i));
    }
  }
}

StrainSinogram make_strain_sinogram(Geometry geometry, Sinogram y, Sinogram path_lengths) {
  require_shape(geometry.sinogram(), y.shape(), "measurements");
  require_shape(geometry.sinogram(), path_lengths.shape(), "path lengths");
  StrainSinogram s;
  s.valid = Sinogram(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (path_lengths[i] > kMinPathLength) {
      s.valid[i] = 1.0;
    } else {
      y[i] = 0.0;
    }
  }
  s.geometry = std::move(geometry);
  s.y = std::move(y);
  s.path_lengths = std::move(path_lengths);
  return s;
}

void require_shape(Shape2D expected, Shape2D actual, const char* what) {
  if (expected != actual) {
    throw ShapeError(std::string(what) + ": expected " + to_string(expected) + ", got " +
                     to_string(actual));
  }
}

}  // namespace monstr
