#pragma once

#include "monstr/core.hpp"

namespace monstr {

/// |(estimate - truth) m| / |truth m|. Throws ShapeError on mismatched grids
/// and std::domain_error if the truth vanishes on the mask.
double nrmse(const ScalarField& estimate, const ScalarField& truth, const ShapeMask& mask);

/// Per-component values are NaN for a component whose truth vanishes on the
/// mask; the total still throws if all three do.
struct NrmseReport {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
  /// Over the three masked components stacked together.
  double total = 0.0;
};

NrmseReport nrmse(const TensorField2D& estimate, const TensorField2D& truth, const ShapeMask& mask);

/// scale * (estimate - truth), componentwise.
TensorField2D error_field(const TensorField2D& estimate, const TensorField2D& truth, double scale);

}  // namespace monstr
