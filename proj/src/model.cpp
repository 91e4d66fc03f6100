#include "shiproll/model.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shiproll {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double active_coefficient(const ShipParams& ship) {
  return ship.damping_form == DampingForm::QuadraticAbs ? ship.lambda2 : ship.lambda3;
}

}  // namespace

bool State6::finite() const {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void validate(const ShipParams& ship) {
  require(std::isfinite(ship.lambda1) && ship.lambda1 >= 0.0, "ship.lambda1 must be finite and >= 0");
  require(std::isfinite(ship.lambda2) && std::isfinite(ship.lambda3), "ship damping coefficients must be finite");
  require(active_coefficient(ship) >= 0.0,
          ship.damping_form == DampingForm::QuadraticAbs ? "ship.lambda2 must be >= 0"
                                                         : "ship.lambda3 must be >= 0");
  require(std::isfinite(ship.c1) && ship.c1 > 0.0, "ship.c1 must be > 0");
  require(std::isfinite(ship.c3) && std::isfinite(ship.c5), "ship.c3 and ship.c5 must be finite");
  require(std::isfinite(ship.phi_v) && ship.phi_v > 0.0, "ship.phi_v must be > 0");
  if (ship.ixx) require(std::isfinite(*ship.ixx) && *ship.ixx > 0.0, "ship.ixx must be > 0");
  if (ship.omega0) require(std::isfinite(*ship.omega0) && *ship.omega0 > 0.0, "ship.omega0 must be > 0");
}

void validate(const FilterParams& filt) {
  require(std::isfinite(filt.v0) && std::isfinite(filt.v1) && std::isfinite(filt.v2) &&
              std::isfinite(filt.v3),
          "filter coefficients must be finite");
  require(std::isfinite(filt.gamma) && filt.gamma > 0.0, "filter.gamma must be > 0");
}

void validate(const Reduced2DModel& model) {
  validate(model.ship);
  require(std::isfinite(model.sigma) && model.sigma > 0.0, "sigma must be > 0");
}

std::optional<double> vanishing_angle(double c1, double c3, double c5) {
  // c(phi) / phi = c1 + c3 u + c5 u^2 with u = phi^2.
  std::optional<double> best_u;
  auto consider = [&](double u) {
    if (std::isfinite(u) && u > 0.0 && (!best_u || u < *best_u)) best_u = u;
  };
  if (c5 == 0.0) {
    if (c3 != 0.0) consider(-c1 / c3);
  } else {
    const double disc = c3 * c3 - 4.0 * c5 * c1;
    if (disc >= 0.0) {
      const double q = -0.5 * (c3 + std::copysign(std::sqrt(disc), c3));
      if (q != 0.0) {
        consider(q / c5);
        consider(c1 / q);
      }
    }
  }
  if (!best_u) return std::nullopt;
  return std::sqrt(*best_u);
}

double restoring(const ShipParams& ship, double phi) {
  assert(std::isfinite(phi));
  const double p2 = phi * phi;
  return phi * (ship.c1 + p2 * (ship.c3 + p2 * ship.c5));
}

double restoring_potential(const ShipParams& ship, double phi) {
  const double p2 = phi * phi;
  return p2 * (ship.c1 / 2.0 + p2 * (ship.c3 / 4.0 + p2 * ship.c5 / 6.0));
}

double nonlinear_damping(const ShipParams& ship, double v) {
  if (ship.damping_form == DampingForm::QuadraticAbs) return ship.lambda2 * v * std::abs(v);
  return ship.lambda3 * v * v * v;
}

double nonlinear_damping_slope(const ShipParams& ship, double v) {
  if (ship.damping_form == DampingForm::QuadraticAbs) return 2.0 * ship.lambda2 * std::abs(v);
  return 3.0 * ship.lambda3 * v * v;
}

double damping_potential(const ShipParams& ship, double v) {
  const double linear = 0.5 * ship.lambda1 * v * v;
  if (ship.damping_form == DampingForm::QuadraticAbs)
    return linear + ship.lambda2 * std::abs(v) * v * v / 3.0;
  return linear + 0.25 * ship.lambda3 * v * v * v * v;
}

Vec6 drift(const ShipParams& ship, const FilterParams& filt, const State6& s) {
  assert(s.finite());
  const double x3 = s[kExcitation];
  return {
      s[kRollRate],
      -ship.lambda1 * s[kRollRate] - nonlinear_damping(ship, s[kRollRate]) - restoring(ship, s[kRoll]) + x3,
      s[kFilter4] - filt.v3 * x3,
      s[kFilter5] - filt.v2 * x3,
      s[kFilter6] - filt.v1 * x3,
      -filt.v0 * x3,
  };
}

double divergence_at_rate(const ShipParams& ship, const FilterParams& filt, double roll_rate) {
  return -ship.lambda1 - nonlinear_damping_slope(ship, roll_rate) - filt.v3;
}

double divergence(const ShipParams& ship, const FilterParams& filt, const State6& s) {
  assert(s.finite());
  return divergence_at_rate(ship, filt, s[kRollRate]);
}

bool is_hurwitz(const FilterParams& filt) {
  const double a3 = filt.v3, a2 = filt.v2, a1 = filt.v1, a0 = filt.v0;
  if (!(std::isfinite(a0) && std::isfinite(a1) && std::isfinite(a2) && std::isfinite(a3))) return false;
  // First column of the Routh table: 1, a3, b1, c1, a0.
  if (!(a3 > 0.0)) return false;
  const double b1 = (a3 * a2 - a1) / a3;
  if (!(b1 > 0.0)) return false;
  const double c1 = (b1 * a1 - a3 * a0) / b1;
  if (!(c1 > 0.0)) return false;
  return a0 > 0.0;
}

std::array<double, 2> reduced_drift(const Reduced2DModel& model, double x1, double x2) {
  const ShipParams& ship = model.ship;
  return {x2, -ship.lambda1 * x2 - nonlinear_damping(ship, x2) - restoring(ship, x1)};
}

}  // namespace shiproll
