#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace monstr {

// Error categories. The CLI maps each one to a distinct exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Rays whose intersection with the sample is shorter than this (pixel units)
/// carry no usable strain measurement.
inline constexpr double kMinPathLength = 1e-6;

/// One microstrain in dimensionless strain units.
inline constexpr double kMicrostrain = 1e-6;

struct Shape2D {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const Shape2D&, const Shape2D&) = default;
};

std::string to_string(Shape2D shape);

/// Parallel-beam scan geometry.
///
/// Axis convention used throughout the library: x runs along columns and y
/// along rows, both centered on the grid center, and a view angle is measured
/// from the +x axis. A ray at angle theta travels in direction
/// (cos theta, sin theta) and sits at signed detector offset
/// t = -x sin theta + y cos theta. Detector columns have unit pitch and are
/// centered on the grid center.
struct Geometry {
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::size_t num_views = 0;
  std::size_t num_detector_cols = 0;
  std::vector<double> angles;

  /// `views` angles spaced uniformly over [0, pi).
  static Geometry uniform(std::size_t rows, std::size_t cols, std::size_t views,
                          std::size_t detector_cols);

  /// The 128x128 grid, 50 views and 128 detector columns of the simulated
  /// cantilever experiments.
  static Geometry reference();

  Shape2D grid() const noexcept { return {grid_rows, grid_cols}; }
  Shape2D sinogram() const noexcept { return {num_views, num_detector_cols}; }
  std::size_t num_rays() const noexcept { return num_views * num_detector_cols; }
  double pixel_pitch() const noexcept { return 1.0; }

  /// Throws ShapeError on empty dimensions or angles that are not strictly
  /// increasing within [0, pi).
  void validate() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Dense row-major 2D array of doubles.
class Array2D {
 public:
  Array2D() = default;
  explicit Array2D(Shape2D shape, double fill = 0.0)
      : shape_(shape), data_(shape.size(), fill) {}
  Array2D(Shape2D shape, std::vector<double> values);

  Shape2D shape() const noexcept { return shape_; }
  std::size_t rows() const noexcept { return shape_.rows; }
  std::size_t cols() const noexcept { return shape_.cols; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  void fill(double v);
  bool all_finite() const noexcept;

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  Shape2D shape_;
  std::vector<double> data_;
};

/// Image-domain scalar field on the reconstruction grid.
class ScalarField : public Array2D {
 public:
  using Array2D::Array2D;
  explicit ScalarField(Array2D a) : Array2D(std::move(a)) {}
};

/// Sinogram-shaped array: rows are views, columns are detector columns.
class Sinogram : public Array2D {
 public:
  using Array2D::Array2D;
  explicit Sinogram(Array2D a) : Array2D(std::move(a)) {}
};

/// Binary sample support. Construction rejects anything other than 0 or 1.
class ShapeMask : public Array2D {
 public:
  ShapeMask() = default;
  explicit ShapeMask(Shape2D shape) : Array2D(shape, 0.0) {}
  explicit ShapeMask(Array2D values);

  bool contains(std::size_t r, std::size_t c) const { return (*this)(r, c) != 0.0; }
  std::size_t count() const noexcept;
  void set(std::size_t r, std::size_t c, bool inside) { Array2D::operator()(r, c) = inside ? 1.0 : 0.0; }
};

enum class Component : std::size_t { xx = 0, yy = 1, xy = 2 };
inline constexpr std::array<Component, 3> kComponents{Component::xx, Component::yy, Component::xy};
const char* component_name(Component k) noexcept;

/// Three co-registered arrays, one per symmetric 2D tensor component
/// (xx, yy, xy in that order).
template <typename T>
struct Tensor3 {
  std::array<T, 3> c;

  Tensor3() = default;
  explicit Tensor3(Shape2D shape) : c{T(shape), T(shape), T(shape)} {}
  Tensor3(T xx, T yy, T xy) : c{std::move(xx), std::move(yy), std::move(xy)} {}

  T& operator[](Component k) { return c[static_cast<std::size_t>(k)]; }
  const T& operator[](Component k) const { return c[static_cast<std::size_t>(k)]; }
  T& xx() { return c[0]; }
  T& yy() { return c[1]; }
  T& xy() { return c[2]; }
  const T& xx() const { return c[0]; }
  const T& yy() const { return c[1]; }
  const T& xy() const { return c[2]; }

  Shape2D shape() const { return c[0].shape(); }
  bool all_finite() const { return c[0].all_finite() && c[1].all_finite() && c[2].all_finite(); }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

using TensorField2D = Tensor3<ScalarField>;
using VirtualSinogramTensor = Tensor3<Sinogram>;

/// Measured strain sinogram. `y` holds path-length-scaled strain
/// (<eps>_i * L_i), `path_lengths` the per-ray sample thickness and `valid`
/// marks rays with L_i > kMinPathLength. y is zero on invalid rays.
struct StrainSinogram {
  Geometry geometry;
  Sinogram y;
  Sinogram path_lengths;
  Sinogram valid;

  /// Average strain y/L on valid rays, zero elsewhere.
  Sinogram average_strain() const;
  std::size_t num_valid() const;

  /// Throws ShapeError / FormatError if the invariants do not hold.
  void validate() const;

  friend bool operator==(const StrainSinogram&, const StrainSinogram&) = default;
};

/// Builds the validity mask and zeroes y on rays with L <= kMinPathLength.
StrainSinogram make_strain_sinogram(Geometry geometry, Sinogram y, Sinogram path_lengths);

void require_shape(Shape2D expected, Shape2D actual, const char* what);

}  // namespace monstr
