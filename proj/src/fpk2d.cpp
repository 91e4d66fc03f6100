#include "shiproll/fpk2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shiproll/errors.hpp"

namespace shiproll {

namespace {

// Slope limited so that p - s/2 and p + s/2 are both nonnegative.
inline double clamp_slope(double s, double p) {
  const double bound = 2.0 * p;
  return std::clamp(s, -bound, bound);
}

bool linear_damping(const ShipParams& ship) {
  return ship.damping_form == DampingForm::QuadraticAbs ? ship.lambda2 == 0.0 : ship.lambda3 == 0.0;
}

/// Precomputed coefficients and scratch space for repeated RHS evaluations.
class FpkOperator {
 public:
  FpkOperator(const Reduced2DModel& model, const Grid2D& grid)
      : grid_(grid),
        n1_(grid.n1),
        n2_(grid.n2),
        inv_h1_(1.0 / grid.h1()),
        inv_h2_(1.0 / grid.h2()),
        diffusion_(0.5 * model.sigma * model.sigma),
        x2_(n2_),
        face_damping_(n2_ + 1),
        restoring_(n1_),
        slope1_(grid.size()),
        slope2_(grid.size()),
        flux1_((n1_ + 1) * n2_),
        flux2_(n1_ * (n2_ + 1)) {
    for (std::size_t j = 0; j < n2_; ++j) x2_[j] = grid.x2(j);
    for (std::size_t j = 0; j <= n2_; ++j) {
      const double y = grid.x2_face(j);
      face_damping_[j] = model.ship.lambda1 * y + nonlinear_damping(model.ship, y);
    }
    for (std::size_t i = 0; i < n1_; ++i) restoring_[i] = restoring(model.ship, grid.x1(i));
  }

  void apply(const std::vector<double>& p, std::vector<double>& out) {
    const std::size_t n1 = n1_, n2 = n2_;
    const auto idx = [n2](std::size_t i, std::size_t j) { return i * n2 + j; };

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        const double c = p[idx(i, j)];
        // The mirrored extension has a kink at an x1 wall, so wall cells take their
        // outer neighbour from the quadratic through the three nearest cells. This
        // keeps face errors of the same form as in the interior.
        double s1;
        if (i == 0) {
          const double ghost = 3.0 * c - 3.0 * p[idx(1, j)] + p[idx(2, j)];
          s1 = 0.5 * (p[idx(1, j)] - ghost);
        } else if (i + 1 == n1) {
          const double ghost = 3.0 * c - 3.0 * p[idx(n1 - 2, j)] + p[idx(n1 - 3, j)];
          s1 = 0.5 * (ghost - p[idx(n1 - 2, j)]);
        } else {
          s1 = 0.5 * (p[idx(i + 1, j)] - p[idx(i - 1, j)]);
        }
        slope1_[idx(i, j)] = clamp_slope(s1, c);
        const double down = j > 0 ? p[idx(i, j - 1)] : c;
        const double up = j + 1 < n2 ? p[idx(i, j + 1)] : c;
        slope2_[idx(i, j)] = clamp_slope(0.5 * (up - down), c);
      }
    }

    // x1 fluxes; face f lies between cells f - 1 and f.
#pragma omp parallel for schedule(static)
    for (std::size_t f = 0; f <= n1; ++f) {
      for (std::size_t j = 0; j < n2; ++j) {
        const double u = x2_[j];
        const std::size_t mirror = n2 - 1 - j;
        double upwind;
        if (f == 0) {
          // Ghost cell -1 mirrors cell 0 at -x2; its right face is cell 0's left face there.
          upwind = u > 0.0 ? p[idx(0, mirror)] - 0.5 * slope1_[idx(0, mirror)]
                           : p[idx(0, j)] - 0.5 * slope1_[idx(0, j)];
        } else if (f == n1) {
          upwind = u > 0.0 ? p[idx(n1 - 1, j)] + 0.5 * slope1_[idx(n1 - 1, j)]
                           : p[idx(n1 - 1, mirror)] + 0.5 * slope1_[idx(n1 - 1, mirror)];
        } else {
          upwind = u > 0.0 ? p[idx(f - 1, j)] + 0.5 * slope1_[idx(f - 1, j)]
                           : p[idx(f, j)] - 0.5 * slope1_[idx(f, j)];
        }
        flux1_[f * n2 + j] = u * upwind;
      }
    }

    // x2 fluxes; face g lies between cells g - 1 and g, walls carry no flux.
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n1; ++i) {
      double* row = &flux2_[i * (n2 + 1)];
      row[0] = 0.0;
      row[n2] = 0.0;
      for (std::size_t g = 1; g < n2; ++g) {
        const double a = -face_damping_[g] - restoring_[i];
        const double lo = p[idx(i, g - 1)];
        const double hi = p[idx(i, g)];
        const double upwind = a > 0.0 ? lo + 0.5 * slope2_[idx(i, g - 1)] : hi - 0.5 * slope2_[idx(i, g)];
        row[g] = a * upwind - diffusion_ * (hi - lo) * inv_h2_;
      }
    }

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        out[idx(i, j)] = -(flux1_[(i + 1) * n2 + j] - flux1_[i * n2 + j]) * inv_h1_ -
                         (flux2_[i * (n2 + 1) + j + 1] - flux2_[i * (n2 + 1) + j]) * inv_h2_;
      }
    }
  }

  // SSP-RK2 (Heun): p1 = p + dt L(p); p <- (p + p1 + dt L(p1)) / 2.
  void step(std::vector<double>& p, double dt) {
    stage_.resize(p.size());
    rhs_.resize(p.size());
    apply(p, rhs_);
    for (std::size_t k = 0; k < p.size(); ++k) stage_[k] = p[k] + dt * rhs_[k];
    apply(stage_, rhs_);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.5 * (p[k] + stage_[k] + dt * rhs_[k]);
  }

 private:
  Grid2D grid_;
  std::size_t n1_, n2_;
  double inv_h1_, inv_h2_;
  double diffusion_;
  std::vector<double> x2_;
  std::vector<double> face_damping_;
  std::vector<double> restoring_;
  std::vector<double> slope1_, slope2_;
  std::vector<double> flux1_, flux2_;
  std::vector<double> stage_, rhs_;
};

void require_same_grid(const Field2D& a, const Field2D& b) {
  if (!(a.grid == b.grid) || a.p.size() != b.p.size()) throw GridMismatchError("fields live on different grids");
}

void check_dt(const Reduced2DModel& model, const Grid2D& grid, double dt) {
  const double limit = admissible_dt(model, grid);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) throw StabilityError(dt, limit);
}

}  // namespace

double Grid2D::x1(std::size_t i) const {
  return 0.5 * (x1_min + x1_max) + (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(n1)) * h1();
}

double Grid2D::x2(std::size_t j) const {
  return 0.5 * (x2_min + x2_max) + (static_cast<double>(j) + 0.5 - 0.5 * static_cast<double>(n2)) * h2();
}

double Grid2D::x2_face(std::size_t j_plus_one) const {
  return 0.5 * (x2_min + x2_max) + (static_cast<double>(j_plus_one) - 0.5 * static_cast<double>(n2)) * h2();
}

void validate(const Grid2D& grid) {
  if (!(std::isfinite(grid.x1_min) && std::isfinite(grid.x1_max) && grid.x1_max > grid.x1_min))
    throw std::invalid_argument("grid x1 range must be finite with x1_max > x1_min");
  if (!(std::isfinite(grid.x2_max) && grid.x2_max > 0.0 && grid.x2_min == -grid.x2_max))
    throw std::invalid_argument("grid x2 range must be symmetric about zero");
  if (grid.n1 < 3 || grid.n2 < 3) throw std::invalid_argument("grid needs at least 3 cells per axis");
}

double Field2D::mass() const {
  double sum = 0.0;
  for (double v : p) sum += v;
  return sum * grid.cell_area();
}

void validate(const Field2D& field) {
  validate(field.grid);
  if (field.p.size() != field.grid.size()) throw std::invalid_argument("field size does not match its grid");
  for (double v : field.p) {
    if (!(std::isfinite(v) && v >= 0.0)) throw std::invalid_argument("field values must be finite and >= 0");
  }
}

Grid2D default_grid(const Reduced2DModel& model, std::size_t n1, std::size_t n2, double x2_half_width_stds) {
  validate(model);
  if (!(model.ship.lambda1 > 0.0)) throw std::invalid_argument("default_grid: lambda1 must be > 0 to size the x2 range");
  const double sd2 = std::sqrt(model.sigma * model.sigma / (2.0 * model.ship.lambda1));
  const double w1 = 0.9 * model.ship.phi_v;
  const double w2 = x2_half_width_stds * sd2;
  Grid2D g{-w1, w1, -w2, w2, n1, n2};
  validate(g);
  return g;
}

double admissible_dt(const Reduced2DModel& model, const Grid2D& grid) {
  validate(model);
  validate(grid);
  double u1 = 0.0;
  for (std::size_t j = 0; j < grid.n2; ++j) u1 = std::max(u1, std::abs(grid.x2(j)));
  double a_max = 0.0;
  for (std::size_t i = 0; i < grid.n1; ++i) {
    const double c = restoring(model.ship, grid.x1(i));
    for (std::size_t g = 1; g < grid.n2; ++g) {
      const double y = grid.x2_face(g);
      a_max = std::max(a_max, std::abs(model.ship.lambda1 * y + nonlinear_damping(model.ship, y) + c));
    }
  }
  const double h1 = grid.h1(), h2 = grid.h2();
  const double rate = 2.0 * u1 / h1 + 2.0 * a_max / h2 + model.sigma * model.sigma / (h2 * h2);
  return 1.0 / rate;
}

double default_dt(const Reduced2DModel& model, const Grid2D& grid) { return 0.9 * admissible_dt(model, grid); }

std::vector<double> evolution_rhs(const Reduced2DModel& model, const Field2D& field) {
  validate(model);
  validate(field.grid);
  FpkOperator op(model, field.grid);
  std::vector<double> out(field.p.size());
  op.apply(field.p, out);
  return out;
}

Field2D step_fpk(const Reduced2DModel& model, const Field2D& field, double dt) {
  validate(model);
  validate(field.grid);
  check_dt(model, field.grid, dt);
  FpkOperator op(model, field.grid);
  Field2D out = field;
  op.step(out.p, dt);
  return out;
}

Field2D evolve(const Reduced2DModel& model, const Field2D& p0, double dt, double t_end) {
  validate(model);
  validate(p0);
  if (!(t_end >= 0.0)) throw std::invalid_argument("evolve: t_end must be >= 0");
  check_dt(model, p0.grid, dt);
  Field2D out = p0;
  if (t_end == 0.0) return out;
  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(n_steps);
  FpkOperator op(model, p0.grid);
  for (std::size_t k = 0; k < n_steps; ++k) op.step(out.p, h);
  return out;
}

SteadyState steady_state(const Reduced2DModel& model, const Field2D& p0, double dt, double tol, double t_max,
                         double check_every) {
  validate(model);
  validate(p0);
  if (!(tol > 0.0 && t_max > 0.0 && check_every > 0.0))
    throw std::invalid_argument("steady_state: tol, t_max and check_every must be > 0");
  check_dt(model, p0.grid, dt);
  const auto chunk_steps = static_cast<std::size_t>(std::ceil(check_every / dt - 1e-9));
  const double h = check_every / static_cast<double>(chunk_steps);
  FpkOperator op(model, p0.grid);
  SteadyState out{p0, 0.0, stationary_residual(model, p0)};
  while (out.residual > tol) {
    if (out.t + 0.5 * check_every > t_max)
      throw NotConvergedError("steady_state: residual " + format_g(out.residual) + " above tolerance at t=" +
                              format_g(out.t));
    for (std::size_t k = 0; k < chunk_steps; ++k) op.step(out.field.p, h);
    out.t += check_every;
    out.residual = stationary_residual(model, out.field);
  }
  return out;
}

Field2D analytic_stationary(const Reduced2DModel& model, const Grid2D& grid) {
  validate(model);
  validate(grid);
  if (!linear_damping(model.ship))
    throw NoClosedFormError("analytic_stationary: no closed form with nonlinear damping");
  if (!(model.ship.lambda1 > 0.0))
    throw NoClosedFormError("analytic_stationary: no normalizable stationary density without linear damping");
  const double beta = 2.0 * model.ship.lambda1 / (model.sigma * model.sigma);
  Field2D f{grid, std::vector<double>(grid.size())};
  double e_min = INFINITY;
  for (std::size_t i = 0; i < grid.n1; ++i)
    for (std::size_t j = 0; j < grid.n2; ++j) {
      const double y = grid.x2(j);
      const double e = beta * (0.5 * y * y + restoring_potential(model.ship, grid.x1(i)));
      f.at(i, j) = e;
      e_min = std::min(e_min, e);
    }
  for (double& v : f.p) v = std::exp(-(v - e_min));
  const double m = f.mass();
  for (double& v : f.p) v /= m;
  return f;
}

double stationary_residual(const Reduced2DModel& model, const Field2D& field) {
  const std::vector<double> r = evolution_rhs(model, field);
  double sum = 0.0;
  for (double v : r) sum += v * v;
  return std::sqrt(sum * field.grid.cell_area());
}

Field2D gaussian_field(const Grid2D& grid, double mean1, double mean2, double sd1, double sd2) {
  validate(grid);
  if (!(sd1 > 0.0 && sd2 > 0.0)) throw std::invalid_argument("gaussian_field: standard deviations must be > 0");
  Field2D f{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.n1; ++i)
    for (std::size_t j = 0; j < grid.n2; ++j) {
      const double z1 = (grid.x1(i) - mean1) / sd1;
      const double z2 = (grid.x2(j) - mean2) / sd2;
      f.at(i, j) = std::exp(-0.5 * (z1 * z1 + z2 * z2));
    }
  const double m = f.mass();
  if (!(m > 0.0)) throw std::invalid_argument("gaussian_field: Gaussian has no mass on the grid");
  for (double& v : f.p) v /= m;
  return f;
}

Field2D uniform_field(const Grid2D& grid) {
  validate(grid);
  const double area = (grid.x1_max - grid.x1_min) * (grid.x2_max - grid.x2_min);
  return {grid, std::vector<double>(grid.size(), 1.0 / area)};
}

double l2_distance(const Field2D& a, const Field2D& b) {
  require_same_grid(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.p.size(); ++k) {
    const double d = a.p[k] - b.p[k];
    sum += d * d;
  }
  return std::sqrt(sum * a.grid.cell_area());
}

TrackResult evolve_and_track(const Reduced2DModel& model, const Field2D& p0, double dt, double t_end,
                             const Field2D& reference, double sample_every) {
  validate(model);
  validate(p0);
  require_same_grid(p0, reference);
  if (!(t_end > 0.0)) throw std::invalid_argument("evolve_and_track: t_end must be > 0");
  if (!(sample_every > 0.0)) throw std::invalid_argument("evolve_and_track: sample_every must be > 0");
  check_dt(model, p0.grid, dt);

  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(n_steps);
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_every / h)));

  TrackResult out;
  out.dt = h;
  out.final_field = p0;
  std::vector<double>& p = out.final_field.p;
  FpkOperator op(model, p0.grid);
  out.series.push_back({0.0, l2_distance(out.final_field, reference)});
  for (std::size_t k = 1; k <= n_steps; ++k) {
    op.step(p, h);
    if (k % stride == 0 || k == n_steps)
      out.series.push_back({static_cast<double>(k) * h, l2_distance(out.final_field, reference)});
  }

  std::size_t start = out.series.size() - 1;
  while (start > 0 && out.series[start].distance <= out.series[start - 1].distance) --start;
  out.monotone_from = out.series[start].t;
  return out;
}

DensityGrid to_density(const Field2D& field) {
  validate(field.grid);
  DensityGrid d;
  d.axes = {{field.grid.x1_min, field.grid.x1_max, field.grid.n1}, {field.grid.x2_min, field.grid.x2_max, field.grid.n2}};
  d.values = field.p;
  return d;
}

}  // namespace shiproll
