#pragma once

// Finite-volume solver for the Fokker-Planck equation of the reduced roll model
//
//   dP/dt = -d/dx1 (x2 P) - d/dx2 (a(x1, x2) P) + (sigma^2 / 2) d2P/dx2^2,
//   a(x1, x2) = -lambda1 x2 - D(x2) - c(x1).
//
// Fluxes are upwinded from a piecewise-linear reconstruction (central slope,
// clamped so both face values stay nonnegative); diffusion uses the centered
// two-point flux; time stepping is SSP-RK2. Under admissible_dt() every stage
// is a convex combination of nonnegative terms, so positivity is preserved.
//
// Boundaries: the x1 walls reflect specularly, (x1, x2) -> (2w - x1, -x2), so
// the flux leaving at x2 re-enters at -x2 and the wall carries no net mass.
// The x2 walls are zero-flux. Mass is conserved to rounding.

#include <cstddef>
#include <optional>
#include <vector>

#include "shiproll/density.hpp"
#include "shiproll/model.hpp"

namespace shiproll {

struct Grid2D {
  double x1_min = -1.0;
  double x1_max = 1.0;
  double x2_min = -1.0;  ///< must equal -x2_max
  double x2_max = 1.0;
  std::size_t n1 = 64;
  std::size_t n2 = 64;

  double h1() const { return (x1_max - x1_min) / static_cast<double>(n1); }
  double h2() const { return (x2_max - x2_min) / static_cast<double>(n2); }
  double cell_area() const { return h1() * h2(); }
  std::size_t size() const { return n1 * n2; }
  /// Cell centers, computed so that mirrored cells have exactly opposite coordinates.
  double x1(std::size_t i) const;
  double x2(std::size_t j) const;
  /// x2 coordinate of the face between cells j and j + 1 (j = -1 .. n2 - 1 as j + 1 = 0 .. n2).
  double x2_face(std::size_t j_plus_one) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

void validate(const Grid2D& grid);

/// Density on a Grid2D, stored row-major by x1 (index i * n2 + j).
struct Field2D {
  Grid2D grid;
  std::vector<double> p;

  double& at(std::size_t i, std::size_t j) { return p[i * grid.n2 + j]; }
  double at(std::size_t i, std::size_t j) const { return p[i * grid.n2 + j]; }
  double mass() const;
};

void validate(const Field2D& field);

/// x1 in [-0.9 phi_v, 0.9 phi_v]; x2 in +-k sqrt(sigma^2 / (2 lambda1)) with k = x2_half_width_stds.
Grid2D default_grid(const Reduced2DModel& model, std::size_t n1, std::size_t n2, double x2_half_width_stds = 5.0);

/// Largest step for which each SSP-RK2 stage is positivity preserving:
///   1 / (2 max|x2| / h1 + 2 max|a| / h2 + sigma^2 / h2^2).
double admissible_dt(const Reduced2DModel& model, const Grid2D& grid);
/// 0.9 * admissible_dt.
double default_dt(const Reduced2DModel& model, const Grid2D& grid);

/// Semi-discrete right-hand side L(p).
std::vector<double> evolution_rhs(const Reduced2DModel& model, const Field2D& field);

/// One SSP-RK2 step. Throws StabilityError when dt exceeds admissible_dt.
Field2D step_fpk(const Reduced2DModel& model, const Field2D& field, double dt);

/// Integrates to t_end with a step no larger than dt that divides t_end evenly.
Field2D evolve(const Reduced2DModel& model, const Field2D& p0, double dt, double t_end);

struct SteadyState {
  Field2D field;
  double t = 0.0;  ///< integration time used
  double residual = 0.0;
};

/// Evolves p0 in chunks of `check_every` until stationary_residual <= tol.
/// Throws NotConvergedError if t_max passes first.
SteadyState steady_state(const Reduced2DModel& model, const Field2D& p0, double dt, double tol, double t_max,
                         double check_every = 1.0);

/// Normalized exp(-(2 lambda1 / sigma^2)(x2^2 / 2 + V(x1))) at cell centers.
/// Throws NoClosedFormError unless the damping is purely linear with lambda1 > 0.
Field2D analytic_stationary(const Reduced2DModel& model, const Grid2D& grid);

/// sqrt(sum L(p)^2 * cell area).
double stationary_residual(const Reduced2DModel& model, const Field2D& field);

/// Normalized product of Gaussians sampled at cell centers.
Field2D gaussian_field(const Grid2D& grid, double mean1, double mean2, double sd1, double sd2);
Field2D uniform_field(const Grid2D& grid);

/// sqrt(sum (a - b)^2 * cell area). Throws GridMismatchError on different grids.
double l2_distance(const Field2D& a, const Field2D& b);

struct DistanceSample {
  double t = 0.0;
  double distance = 0.0;
};

struct TrackResult {
  std::vector<DistanceSample> series;
  Field2D final_field;
  double dt = 0.0;  ///< step actually used
  /// Earliest sample time after which the series never increases.
  std::optional<double> monotone_from;
};

/// Evolves p0 to t_end recording ||P(t) - reference|| every sample_every time units.
TrackResult evolve_and_track(const Reduced2DModel& model, const Field2D& p0, double dt, double t_end,
                             const Field2D& reference, double sample_every);

DensityGrid to_density(const Field2D& field);

}  // namespace shiproll
