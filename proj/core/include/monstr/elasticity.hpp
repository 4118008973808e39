#pragma once

#include <array>

#include "monstr/core.hpp"

namespace monstr {

using Matrix3 = std::array<std::array<double, 3>, 3>;
using Vector3 = std::array<double, 3>;

Vector3 operator*(const Matrix3& m, const Vector3& v);
/// Row vector times matrix.
Vector3 operator*(const Vector3& v, const Matrix3& m);
Matrix3 operator*(const Matrix3& a, const Matrix3& b);

/// Plane-stress stiffness matrix in tensor-shear form,
///   C = E / (1 - nu^2) * [[1, nu, 0], [nu, 1, 0], [0, 0, 1 - nu]].
/// Throws ConfigError unless E > 0 and -1 < nu < 0.5.
Matrix3 stiffness_matrix(double youngs_modulus, double poisson_ratio);

/// Closed-form inverse of stiffness_matrix.
Matrix3 compliance_matrix(double youngs_modulus, double poisson_ratio);

/// Isotropic plane-stress material. Young's modulus defaults to 1 so stress
/// carries the same units as strain.
class ElasticityModel {
 public:
  explicit ElasticityModel(double youngs_modulus = 1.0, double poisson_ratio = 0.3);

  double youngs_modulus() const noexcept { return youngs_; }
  double poisson_ratio() const noexcept { return poisson_; }
  const Matrix3& stiffness() const noexcept { return stiffness_; }
  const Matrix3& compliance() const noexcept { return compliance_; }

 private:
  double youngs_;
  double poisson_;
  Matrix3 stiffness_;
  Matrix3 compliance_;
};

/// Per-pixel product with a 3x3 matrix acting on (xx, yy, xy).
template <typename T>
Tensor3<T> apply_pointwise(const Matrix3& m, const Tensor3<T>& in) {
  Tensor3<T> out(in.shape());
  const std::size_t n = in.xx().size();
  for (std::size_t j = 0; j < n; ++j) {
    const Vector3 v{in.xx()[j], in.yy()[j], in.xy()[j]};
    const Vector3 r = m * v;
    out.xx()[j] = r[0];
    out.yy()[j] = r[1];
    out.xy()[j] = r[2];
  }
  return out;
}

/// sigma_j = C eps_j at every pixel.
TensorField2D strain_to_stress(const TensorField2D& strain, const ElasticityModel& model);
/// eps_j = C^-1 sigma_j at every pixel.
TensorField2D stress_to_strain(const TensorField2D& stress, const ElasticityModel& model);

}  // namespace monstr
