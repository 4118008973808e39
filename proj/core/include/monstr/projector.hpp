#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "monstr/core.hpp"

namespace monstr {

/// One nonzero of the system matrix: pixel (or ray) index and intersection
/// length in pixel units.
struct MatrixEntry {
  std::uint32_t index;
  double length;
};

/// Parallel-beam projection operator A with its exact transpose.
///
/// Each detector column casts a single ray; the entries of A are exact
/// ray/pixel intersection lengths obtained by a Siddon-style traversal.
/// The sparse structure is built once per geometry. Ray index i maps to
/// (view, column) as i = view * num_detector_cols + column, pixel index j to
/// (row, col) as j = row * grid_cols + col.
class Projector {
 public:
  explicit Projector(Geometry geometry);

  const Geometry& geometry() const noexcept { return geometry_; }
  std::size_t nonzeros() const noexcept { return ray_entries_.size(); }

  Sinogram project(const ScalarField& f) const;
  ScalarField backproject(const Sinogram& s) const;

  void project(std::span<const double> f, std::span<double> out) const;
  void backproject(std::span<const double> s, std::span<double> out) const;

  /// Per-ray sample thickness: project applied to the mask.
  Sinogram path_lengths(const ShapeMask& mask) const;

  /// Pixels crossed by ray i, in traversal order.
  std::span<const MatrixEntry> ray(std::size_t i) const;
  /// Rays crossing pixel j, sorted by ray index.
  std::span<const MatrixEntry> pixel(std::size_t j) const;

 private:
  Geometry geometry_;
  std::vector<std::size_t> ray_offsets_;
  std::vector<MatrixEntry> ray_entries_;
  std::vector<std::size_t> pixel_offsets_;
  std::vector<MatrixEntry> pixel_entries_;
};

/// Intersections of a single ray with the grid, computed directly from the
/// geometry without the precomputed matrix.
std::vector<MatrixEntry> trace_ray(const Geometry& geometry, std::size_t view,
                                   std::size_t detector_col);

}  // namespace monstr
