#include "monstr/elasticity.hpp"

#include <cmath>
#include <string>

namespace monstr {
namespace {

void check_material(double E, double nu) {
  if (!(E > 0.0) || !std::isfinite(E)) {
    throw ConfigError("Young's modulus must be positive, got " + std::to_string(E));
  }
  if (!(nu > -1.0 && nu < 0.5)) {
    throw ConfigError("Poisson's ratio must lie in (-1, 0.5), got " + std::to_string(nu));
  }
}

}  // namespace

Vector3 operator*(const Matrix3& m, const Vector3& v) {
  Vector3 r{};
  for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

Vector3 operator*(const Vector3& v, const Matrix3& m) {
  Vector3 r{};
  for (int j = 0; j < 3; ++j) r[j] = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j];
  return r;
}

Matrix3 operator*(const Matrix3& a, const Matrix3& b) {
  Matrix3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

Matrix3 stiffness_matrix(double E, double nu) {
  check_material(E, nu);
  const double s = E / (1.0 - nu * nu);
  return {{{s, s * nu, 0.0}, {s * nu, s, 0.0}, {0.0, 0.0, s * (1.0 - nu)}}};
}

Matrix3 compliance_matrix(double E, double nu) {
  check_material(E, nu);
  const double s = 1.0 / E;
  return {{{s, -s * nu, 0.0}, {-s * nu, s, 0.0}, {0.0, 0.0, s * (1.0 + nu)}}};
}

ElasticityModel::ElasticityModel(double youngs_modulus, double poisson_ratio)
    : youngs_(youngs_modulus),
      poisson_(poisson_ratio),
      stiffness_(stiffness_matrix(youngs_modulus, poisson_ratio)),
      compliance_(compliance_matrix(youngs_modulus, poisson_ratio)) {}

TensorField2D strain_to_stress(const TensorField2D& strain, const ElasticityModel& model) {
  return apply_pointwise(model.stiffness(), strain);
}

TensorField2D stress_to_strain(const TensorField2D& stress, const ElasticityModel& model) {
  return apply_pointwise(model.compliance(), stress);
}

}  // namespace monstr
