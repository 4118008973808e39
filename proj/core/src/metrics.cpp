#include "monstr/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace monstr {
namespace {

struct Norms {
  double err = 0.0;
  double ref = 0.0;
};

Norms masked_norms(const ScalarField& estimate, const ScalarField& truth, const ShapeMask& mask) {
  require_shape(truth.shape(), estimate.shape(), "nrmse: estimate vs truth");
  require_shape(truth.shape(), mask.shape(), "nrmse: mask vs truth");
  Norms n;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (mask[j] == 0.0) continue;
    const double d = estimate[j] - truth[j];
    n.err += d * d;
    n.ref += truth[j] * truth[j];
  }
  return n;
}

double ratio(const Norms& n) {
  if (n.ref == 0.0) throw std::domain_error("nrmse: ground truth is zero on the mask");
  return std::sqrt(n.err / n.ref);
}

}  // namespace

double nrmse(const ScalarField& estimate, const ScalarField& truth, const ShapeMask& mask) {
  return ratio(masked_norms(estimate, truth, mask));
}

NrmseReport nrmse(const TensorField2D& estimate, const TensorField2D& truth, const ShapeMask& mask) {
  NrmseReport r;
  Norms total;
  double* out[3] = {&r.xx, &r.yy, &r.xy};
  for (auto k : kComponents) {
    const Norms n = masked_norms(estimate[k], truth[k], mask);
    *out[static_cast<std::size_t>(k)] =
        n.ref == 0.0 ? std::numeric_limits<double>::quiet_NaN() : ratio(n);
    total.err += n.err;
    total.ref += n.ref;
  }
  r.total = ratio(total);
  return r;
}

TensorField2D error_field(const TensorField2D& estimate, const TensorField2D& truth, double scale) {
  require_shape(truth.shape(), estimate.shape(), "error_field");
  TensorField2D out(truth.shape());
  for (auto k : kComponents)
    for (std::size_t j = 0; j < truth[k].size(); ++j)
      out[k][j] = scale * (estimate[k][j] - truth[k][j]);
  return out;
}

}  // namespace monstr
