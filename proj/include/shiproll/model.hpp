#pragma once

// Roll model: one-degree-of-freedom roll with linear + nonlinear damping,
// driven by the output of a fourth-order shaping filter fed by white noise.
//
//   x1' = x2
//   x2' = -lambda1 x2 - D(x2) - c(x1) + x3
//   x3' = x4 - v3 x3
//   x4' = x5 - v2 x3 + gamma W
//   x5' = x6 - v1 x3
//   x6' = -v0 x3
//
// All quantities are dimensionless (normalized by Ixx * omega0^2).

#include <array>
#include <cstddef>
#include <optional>

namespace shiproll {

enum class DampingForm {
  QuadraticAbs,  ///< D(v) = lambda2 * v * |v|
  Cubic,         ///< D(v) = lambda3 * v^3
};

struct ShipParams {
  double lambda1 = 0.1;
  DampingForm damping_form = DampingForm::QuadraticAbs;
  double lambda2 = 0.2;
  double lambda3 = 0.0;
  // c(phi) = c1 phi + c3 phi^3 + c5 phi^5
  double c1 = 1.0;
  double c3 = -1.0;
  double c5 = 0.0;
  /// Capsize threshold on |x1| (radians).
  double phi_v = 1.0;
  // Metadata only; the equations are already normalized.
  std::optional<double> ixx;
  std::optional<double> omega0;
};

struct FilterParams {
  // Characteristic polynomial s^4 + v3 s^3 + v2 s^2 + v1 s + v0.
  // Defaults are the pole pairs (w=0.8, zeta=0.2) and (w=1.2, zeta=0.1).
  double v0 = 0.9216;
  double v1 = 0.6144;
  double v2 = 2.1568;
  double v3 = 0.56;
  double gamma = 0.3;
};

/// Named indices into the state vector.
enum StateIndex : std::size_t {
  kRoll = 0,
  kRollRate = 1,
  kExcitation = 2,
  kFilter4 = 3,
  kFilter5 = 4,
  kFilter6 = 5,
};

struct State6 {
  std::array<double, 6> x{};

  double& operator[](std::size_t i) { return x[i]; }
  double operator[](std::size_t i) const { return x[i]; }

  double roll() const { return x[kRoll]; }
  double roll_rate() const { return x[kRollRate]; }
  double excitation() const { return x[kExcitation]; }

  bool finite() const;

  friend bool operator==(const State6&, const State6&) = default;
};

using Vec6 = std::array<double, 6>;

/// Noise input direction: white noise enters the x4 equation only.
inline constexpr Vec6 kNoiseDirection{0.0, 0.0, 0.0, 1.0, 0.0, 0.0};

/// Throws std::invalid_argument when a ShipParams invariant is violated.
void validate(const ShipParams& ship);
/// Throws std::invalid_argument when gamma <= 0 or a coefficient is not finite.
/// Hurwitz stability is checked separately (see is_hurwitz).
void validate(const FilterParams& filt);

/// Smallest positive root of c(phi) = 0, if any.
std::optional<double> vanishing_angle(double c1, double c3, double c5);

double restoring(const ShipParams& ship, double phi);
/// Potential V(phi) = integral of c from 0 to phi.
double restoring_potential(const ShipParams& ship, double phi);
/// Nonlinear part of the damping, D(v).
double nonlinear_damping(const ShipParams& ship, double v);
/// dD/dv.
double nonlinear_damping_slope(const ShipParams& ship, double v);
/// Integral of (lambda1 u + D(u)) from 0 to v.
double damping_potential(const ShipParams& ship, double v);

Vec6 drift(const ShipParams& ship, const FilterParams& filt, const State6& s);

/// Analytic divergence of the drift; depends on x2 only.
double divergence(const ShipParams& ship, const FilterParams& filt, const State6& s);
double divergence_at_rate(const ShipParams& ship, const FilterParams& filt, double roll_rate);

/// Routh-Hurwitz test for s^4 + v3 s^3 + v2 s^2 + v1 s + v0.
bool is_hurwitz(const FilterParams& filt);

/// Reduced two-state model: the filter is removed and white noise of
/// intensity sigma forces the roll rate directly.
struct Reduced2DModel {
  ShipParams ship;
  double sigma = 0.3;
};

void validate(const Reduced2DModel& model);

/// Drift (x2, -lambda1 x2 - D(x2) - c(x1)) of the reduced model.
std::array<double, 2> reduced_drift(const Reduced2DModel& model, double x1, double x2);

}  // namespace shiproll
