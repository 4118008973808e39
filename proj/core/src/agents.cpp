#include "monstr/agents.hpp"

#include <cmath>
#include <string>

namespace monstr {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("agents.") + name + " must be positive, got " +
                      std::to_string(v));
  }
}

}  // namespace

void AgentParams::validate() const {
  require_positive(alpha_y, "alpha_y");
  require_positive(alpha_v, "alpha_v");
  require_positive(alpha_e, "alpha_e");
  require_positive(qggmrf.T, "qggmrf.T");
  require_positive(cg_tol, "cg_tol");
  if (!(qggmrf.q > 1.0 && qggmrf.q <= qggmrf.p)) {
    throw ConfigError("agents.qggmrf.q must satisfy 1 < q <= p");
  }
  if (qggmrf.p != 2.0) throw ConfigError("agents.qggmrf.p must be 2");
  if (!(qggmrf.sigma_x >= 0.0)) throw ConfigError("agents.qggmrf.sigma_x must be >= 0 (0 = auto)");
  if (recon_inner_iters < 1) throw ConfigError("agents.recon_inner_iters must be >= 1");
  if (equil_sweeps < 1) throw ConfigError("agents.equil_sweeps must be >= 1");
}

// ---------------------------------------------------------------------------
// Detector agent

Vector3 detector_prox(const Vector3& p0, double y, const Vector3& wt, double alpha_y) {
  const double ww = wt[0] * wt[0] + wt[1] * wt[1] + wt[2] * wt[2];
  const double misfit = y - (wt[0] * p0[0] + wt[1] * p0[1] + wt[2] * p0[2]);
  const double step = misfit / (2.0 * alpha_y * alpha_y + ww);
  return {p0[0] + step * wt[0], p0[1] + step * wt[1], p0[2] + step * wt[2]};
}

VirtualSinogramTensor detector_agent(const VirtualSinogramTensor& p0, const StrainSinogram& m,
                                     const RayWeights& weights, double alpha_y) {
  require_positive(alpha_y, "alpha_y");
  for (auto k : kComponents) require_shape(m.y.shape(), p0[k].shape(), "detector agent input");
  if (weights.w_tilde.size() != m.y.size()) {
    throw ShapeError("detector agent: ray weights do not match the sinogram");
  }
  VirtualSinogramTensor out = p0;
  const std::size_t n = m.y.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    if (m.valid[i] == 0.0) continue;
    const Vector3 p = detector_prox({p0.xx()[i], p0.yy()[i], p0.xy()[i]}, m.y[i],
                                    weights.w_tilde[i], alpha_y);
    out.xx()[i] = p[0];
    out.yy()[i] = p[1];
    out.xy()[i] = p[2];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstruction agent

const std::array<Neighbor, 8>& neighborhood() {
  static const std::array<Neighbor, 8> table = [] {
    const double diag = 1.0 / std::sqrt(2.0);
    const double total = 4.0 + 4.0 * diag;
    const double e = 1.0 / total;
    const double d = diag / total;
    return std::array<Neighbor, 8>{{{-1, -1, d}, {-1, 0, e}, {-1, 1, d}, {0, -1, e},
                                    {0, 1, e}, {1, -1, d}, {1, 0, e}, {1, 1, d}}};
  }();
  return table;
}

QggmrfPrior::QggmrfPrior(const QggmrfParams& params) : params_(params) {
  if (!(params.q > 1.0 && params.q <= params.p) || params.p != 2.0 || !(params.T > 0.0) ||
      !(params.sigma_x > 0.0)) {
    throw ConfigError("qGGMRF prior requires 1 < q <= p = 2, T > 0 and sigma_x > 0");
  }
}

double QggmrfPrior::potential(double delta) const {
  const auto& [q, p, T, sigma] = params_;
  const double a = std::abs(delta);
  const double s = std::pow(a / (T * sigma), p - q);
  return std::pow(a, p) / (p * std::pow(sigma, p)) / (1.0 + s);
}

double QggmrfPrior::surrogate_coefficient(double delta) const {
  const auto& [q, p, T, sigma] = params_;
  const double a = std::abs(delta);
  const double s = std::pow(a / (T * sigma), p - q);
  return std::pow(a, p - 2.0) / (2.0 * std::pow(sigma, p)) * (1.0 + (q / p) * s) /
         ((1.0 + s) * (1.0 + s));
}

double QggmrfPrior::value(const ScalarField& x, const ShapeMask* region) const {
  const auto rows = static_cast<long>(x.rows());
  const auto cols = static_cast<long>(x.cols());
  double acc = 0.0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (region && !region->contains(r, c)) continue;
      // Forward half of the neighborhood, so each pair is counted once.
      for (const auto& nb : neighborhood()) {
        if (nb.dr < 0 || (nb.dr == 0 && nb.dc <= 0)) continue;
        const long rr = r + nb.dr;
        const long cc = c + nb.dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        if (region && !region->contains(rr, cc)) continue;
        acc += nb.weight * potential(x(r, c) - x(rr, cc));
      }
    }
  }
  return acc;
}

ReconstructionAgent::ReconstructionAgent(const Projector& projector, Sinogram ray_weights,
                                         double alpha_v, const QggmrfParams& prior,
                                         int inner_iters, std::optional<ShapeMask> region)
    : projector_(projector),
      ray_weights_(std::move(ray_weights)),
      inv_var_(1.0 / (alpha_v * alpha_v)),
      prior_(prior),
      inner_iters_(inner_iters),
      region_(std::move(region)) {
  require_shape(projector.geometry().sinogram(), ray_weights_.shape(), "reconstruction weights");
  if (region_) require_shape(projector.geometry().grid(), region_->shape(), "reconstruction region");
  require_positive(alpha_v, "alpha_v");
  if (inner_iters < 1) throw ConfigError("agents.recon_inner_iters must be >= 1");
  const std::size_t num_pixels = projector.geometry().grid().size();
  curvature_.assign(num_pixels, 0.0);
  for (std::size_t j = 0; j < num_pixels; ++j) {
    double acc = 0.0;
    for (const auto& e : projector.pixel(j)) acc += e.length * e.length * ray_weights_[e.index];
    curvature_[j] = inv_var_ * acc;
  }
}

double ReconstructionAgent::objective(const Sinogram& target, const ScalarField& x) const {
  const Sinogram ax = projector_.project(x);
  double data = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double e = target[i] - ax[i];
    data += ray_weights_[i] * e * e;
  }
  return 0.5 * inv_var_ * data + prior_.value(x, region_ ? &*region_ : nullptr);
}

void ReconstructionAgent::sweep(std::span<double> x, std::span<double> error, Shape2D grid) const {
  const auto rows = static_cast<long>(grid.rows);
  const auto cols = static_cast<long>(grid.cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const auto j = static_cast<std::size_t>(r * cols + c);
      if (region_ && (*region_)[j] == 0.0) continue;
      const auto column = projector_.pixel(j);

      double grad = 0.0;
      for (const auto& e : column) grad -= e.length * ray_weights_[e.index] * error[e.index];
      grad *= inv_var_;

      const double xj = x[j];
      double prior_num = 0.0;
      double prior_den = 0.0;
      for (const auto& nb : neighborhood()) {
        const long rr = r + nb.dr;
        const long cc = c + nb.dc;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        const auto jr = static_cast<std::size_t>(rr * cols + cc);
        if (region_ && (*region_)[jr] == 0.0) continue;
        const double xr = x[jr];
        const double b = 2.0 * nb.weight * prior_.surrogate_coefficient(xj - xr);
        prior_num += b * xr;
        prior_den += b;
      }

      const double den = curvature_[j] + prior_den;
      if (!(den > 0.0)) continue;
      const double next = (curvature_[j] * xj - grad + prior_num) / den;
      const double step = next - xj;
      if (step == 0.0) continue;
      x[j] = next;
      for (const auto& e : column) error[e.index] -= e.length * step;
    }
  }
}

ScalarField ReconstructionAgent::reconstruct(const Sinogram& target, ScalarField x,
                                             std::vector<double>* objective_trace) const {
  const Geometry& g = projector_.geometry();
  require_shape(g.sinogram(), target.shape(), "reconstruction target");
  require_shape(g.grid(), x.shape(), "reconstruction warm start");

  Sinogram error = projector_.project(x);
  for (std::size_t i = 0; i < error.size(); ++i) error[i] = target[i] - error[i];

  if (objective_trace) objective_trace->push_back(objective(target, x));
  for (int it = 0; it < inner_iters_; ++it) {
    sweep(x.values(), error.values(), g.grid());
    if (objective_trace) objective_trace->push_back(objective(target, x));
  }
  return x;
}

TensorField2D ReconstructionAgent::operator()(const VirtualSinogramTensor& target,
                                              const TensorField2D& warm) const {
  TensorField2D out = warm;
#pragma omp parallel for schedule(static, 1)
  for (int k = 0; k < 3; ++k) {
    out.c[k] = reconstruct(target.c[k], warm.c[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equilibrium agent

namespace {

// A forward difference between (r, c) and its right (down) neighbor exists
// when the neighbor is on the grid and, with a region, both pixels are in it.
bool link_x(const ShapeMask* region, std::size_t r, std::size_t c, std::size_t cols) {
  if (c + 1 >= cols) return false;
  return region == nullptr || (region->contains(r, c) && region->contains(r, c + 1));
}

bool link_y(const ShapeMask* region, std::size_t r, std::size_t c, std::size_t rows) {
  if (r + 1 >= rows) return false;
  return region == nullptr || (region->contains(r, c) && region->contains(r + 1, c));
}

void check_region(const ShapeMask* region, Shape2D shape) {
  if (region != nullptr) require_shape(shape, region->shape(), "equilibrium region");
}

}  // namespace

ScalarField diff_x(const ScalarField& f, const ShapeMask* region) {
  check_region(region, f.shape());
  ScalarField g(f.shape());
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.cols(); ++c)
      if (link_x(region, r, c, f.cols())) g(r, c) = f(r, c + 1) - f(r, c);
  return g;
}

ScalarField diff_y(const ScalarField& f, const ShapeMask* region) {
  check_region(region, f.shape());
  ScalarField g(f.shape());
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.cols(); ++c)
      if (link_y(region, r, c, f.rows())) g(r, c) = f(r + 1, c) - f(r, c);
  return g;
}

ScalarField diff_x_adjoint(const ScalarField& g, const ShapeMask* region) {
  check_region(region, g.shape());
  ScalarField f(g.shape());
  const std::size_t n = g.cols();
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c)
      f(r, c) = (c >= 1 && link_x(region, r, c - 1, n) ? g(r, c - 1) : 0.0) -
                (link_x(region, r, c, n) ? g(r, c) : 0.0);
  return f;
}

ScalarField diff_y_adjoint(const ScalarField& g, const ShapeMask* region) {
  check_region(region, g.shape());
  ScalarField f(g.shape());
  const std::size_t n = g.rows();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < g.cols(); ++c)
      f(r, c) = (r >= 1 && link_y(region, r - 1, c, n) ? g(r - 1, c) : 0.0) -
                (link_y(region, r, c, n) ? g(r, c) : 0.0);
  return f;
}

std::array<ScalarField, 2> equilibrium_residual(const TensorField2D& s, const ShapeMask* region) {
  ScalarField d1 = diff_x(s.xx(), region);
  ScalarField d2 = diff_y(s.yy(), region);
  const ScalarField dy_xy = diff_y(s.xy(), region);
  const ScalarField dx_xy = diff_x(s.xy(), region);
  for (std::size_t j = 0; j < d1.size(); ++j) {
    d1[j] += dy_xy[j];
    d2[j] += dx_xy[j];
  }
  return {std::move(d1), std::move(d2)};
}

double equilibrium_norm(const TensorField2D& s, const ShapeMask* region) {
  const auto d = equilibrium_residual(s, region);
  return std::sqrt(dot(d[0].values(), d[0].values()) + dot(d[1].values(), d[1].values()));
}

namespace {

double tensor_norm(const TensorField2D& s) {
  double acc = 0.0;
  for (const auto& c : s.c) acc += dot(c.values(), c.values());
  return std::sqrt(acc);
}

// (2 I + kappa D^T D) along one line, solved in place. links[i] says whether
// the difference between entries i and i + 1 exists.
void solve_line(std::span<double> rhs, std::span<const char> links, double kappa) {
  const std::size_t n = rhs.size();
  std::vector<double> lower(n, 0.0), diag(n, 2.0), upper(n, 0.0), scratch(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!links[i]) continue;
    upper[i] = -kappa;
    lower[i + 1] = -kappa;
    diag[i] += kappa;
    diag[i + 1] += kappa;
  }
  solve_tridiagonal(lower, diag, upper, rhs, scratch);
}

// D^T D v along x (axis 1) or y (axis 0), added into out with factor `scale`.
void add_second_difference(const ScalarField& v, int axis, double scale, const ShapeMask* region,
                           ScalarField& out) {
  const std::size_t rows = v.rows();
  const std::size_t cols = v.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      if (axis == 1) {
        if (c >= 1 && link_x(region, r, c - 1, cols)) acc += v(r, c) - v(r, c - 1);
        if (link_x(region, r, c, cols)) acc -= v(r, c + 1) - v(r, c);
      } else {
        if (r >= 1 && link_y(region, r - 1, c, rows)) acc += v(r, c) - v(r - 1, c);
        if (link_y(region, r, c, rows)) acc -= v(r + 1, c) - v(r, c);
      }
      out(r, c) += scale * acc;
    }
  }
}

}  // namespace

EquilibriumAgent::EquilibriumAgent(double alpha_e, int sweeps, double cg_tol,
                                   std::optional<ShapeMask> region)
    : kappa_(1.0 / (alpha_e * alpha_e)), sweeps_(sweeps), cg_tol_(cg_tol),
      region_(std::move(region)) {
  require_positive(alpha_e, "alpha_e");
  require_positive(cg_tol, "cg_tol");
  if (sweeps < 1) throw ConfigError("agents.equil_sweeps must be >= 1");
}

double EquilibriumAgent::cg_abs_tolerance(const TensorField2D& s0) const {
  return cg_tol_ * (1.0 + tensor_norm(s0));
}

void EquilibriumAgent::update_xx(TensorField2D& s, const TensorField2D& s0) const {
  // (2 I + kappa Dx^T Dx) s_xx = 2 s0_xx - kappa Dx^T Dy s_xy, row by row.
  const ShapeMask* region = this->region();
  ScalarField rhs = diff_x_adjoint(diff_y(s.xy(), region), region);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = 2.0 * s0.xx()[j] - kappa_ * rhs[j];
  const std::size_t rows = rhs.rows();
  const std::size_t cols = rhs.cols();
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<char> links(cols);
    for (std::size_t c = 0; c < cols; ++c) links[c] = link_x(region, r, c, cols);
    solve_line(std::span<double>(rhs.data() + r * cols, cols), links, kappa_);
  }
  s.xx() = std::move(rhs);
}

void EquilibriumAgent::update_yy(TensorField2D& s, const TensorField2D& s0) const {
  // (2 I + kappa Dy^T Dy) s_yy = 2 s0_yy - kappa Dy^T Dx s_xy, column by column.
  const ShapeMask* region = this->region();
  ScalarField rhs = diff_y_adjoint(diff_x(s.xy(), region), region);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] = 2.0 * s0.yy()[j] - kappa_ * rhs[j];
  const std::size_t rows = rhs.rows();
  const std::size_t cols = rhs.cols();
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> line(rows);
    std::vector<char> links(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      line[r] = rhs(r, c);
      links[r] = link_y(region, r, c, rows);
    }
    solve_line(line, links, kappa_);
    for (std::size_t r = 0; r < rows; ++r) rhs(r, c) = line[r];
  }
  s.yy() = std::move(rhs);
}

CgResult EquilibriumAgent::update_xy(TensorField2D& s, const TensorField2D& s0) const {
  // (2 I + kappa (Dy^T Dy + Dx^T Dx)) s_xy
  //     = 2 s0_xy - kappa (Dy^T Dx s_xx + Dx^T Dy s_yy)
  const ShapeMask* region = this->region();
  const Shape2D shape = s.shape();
  ScalarField rhs = diff_y_adjoint(diff_x(s.xx(), region), region);
  const ScalarField other = diff_x_adjoint(diff_y(s.yy(), region), region);
  for (std::size_t j = 0; j < rhs.size(); ++j) {
    rhs[j] = 2.0 * s0.xy()[j] - kappa_ * (rhs[j] + other[j]);
  }
  const double kappa = kappa_;
  auto apply = [shape, kappa, region](std::span<const double> in, std::span<double> out) {
    ScalarField v(shape, std::vector<double>(in.begin(), in.end()));
    ScalarField r(shape);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = 2.0 * v[j];
    add_second_difference(v, 1, kappa, region, r);
    add_second_difference(v, 0, kappa, region, r);
    std::copy(r.values().begin(), r.values().end(), out.begin());
  };
  const int max_iters = static_cast<int>(std::max<std::size_t>(100, 4 * shape.size()));
  return conjugate_gradient(apply, rhs.values(), s.xy().values(), cg_abs_tolerance(s0),
                            max_iters);
}

double EquilibriumAgent::objective(const TensorField2D& s, const TensorField2D& s0) const {
  const auto d = equilibrium_residual(s, region());
  double dd = dot(d[0].values(), d[0].values()) + dot(d[1].values(), d[1].values());
  double fit = 0.0;
  for (auto k : kComponents) {
    for (std::size_t j = 0; j < s[k].size(); ++j) {
      const double e = s[k][j] - s0[k][j];
      fit += e * e;
    }
  }
  return 0.5 * kappa_ * dd + fit;
}

ScalarField EquilibriumAgent::block_gradient(const TensorField2D& s, const TensorField2D& s0,
                                             Component k) const {
  const ShapeMask* region = this->region();
  const auto d = equilibrium_residual(s, region);
  ScalarField g;
  switch (k) {
    case Component::xx: g = diff_x_adjoint(d[0], region); break;
    case Component::yy: g = diff_y_adjoint(d[1], region); break;
    case Component::xy: {
      g = diff_y_adjoint(d[0], region);
      const ScalarField other = diff_x_adjoint(d[1], region);
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += other[j];
      break;
    }
  }
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = kappa_ * g[j] + 2.0 * (s[k][j] - s0[k][j]);
  return g;
}

TensorField2D EquilibriumAgent::operator()(const TensorField2D& initial) const {
  if (region_) require_shape(initial.shape(), region_->shape(), "equilibrium region");
  TensorField2D s = initial;
  for (int sweep = 0; sweep < sweeps_; ++sweep) {
    update_xx(s, initial);
    update_yy(s, initial);
    update_xy(s, initial);
  }
  return s;
}

TensorField2D equilibrium_agent(const TensorField2D& initial, double alpha_e, int sweeps,
                                double cg_tol, const ShapeMask* region) {
  std::optional<ShapeMask> r;
  if (region != nullptr) r = *region;
  return EquilibriumAgent(alpha_e, sweeps, cg_tol, std::move(r))(initial);
}

// ---------------------------------------------------------------------------
// Support agent

TensorField2D support_agent(const TensorField2D& stress, const ShapeMask& mask) {
  require_shape(mask.shape(), stress.shape(), "support agent");
  TensorField2D out = stress;
  for (auto& c : out.c)
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= mask[j];
  return out;
}

}  // namespace monstr
