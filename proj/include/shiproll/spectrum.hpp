#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "shiproll/model.hpp"

namespace shiproll {

/// Frequency grid (rad/s, strictly increasing, > 0) with nonnegative ordinates.
struct SpectrumSamples {
  std::vector<double> omegas;
  std::vector<double> values;
};

/// Roll-moment amplitude per unit wave height, |F_roll(omega)|.
struct RaoTable {
  std::vector<double> omegas;
  std::vector<double> magnitudes;
};

struct WaveParams {
  double hs = 4.0;  ///< significant wave height (m)
  double g = 9.81;  ///< gravitational acceleration (m/s^2)

  /// Pierson-Moskowitz amplitude A = 0.0081 g^2.
  double amplitude() const { return 0.0081 * g * g; }
};

void validate(const SpectrumSamples& s);
void validate(const RaoTable& rao);
void validate(const WaveParams& wave);

/// S(omega) = A omega^-5 exp(-4A / (hs^2 omega^4)). Throws std::domain_error for omega <= 0.
double pierson_moskowitz(const WaveParams& wave, double omega);
SpectrumSamples pierson_moskowitz(const WaveParams& wave, std::span<const double> omegas);

/// Peak frequency located numerically (golden-section search on log omega).
double pierson_moskowitz_peak(const WaveParams& wave);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

/// 64 log-spaced points in [0.1, 3.0] rad/s.
std::vector<double> default_frequency_grid();

RaoTable unit_rao(std::span<const double> omegas);

/// Linear interpolation of |F_roll| inside the table; throws std::out_of_range outside.
double interpolate_rao(const RaoTable& rao, double omega);

/// S_ext(omega) = S_wave(omega) |F_roll(omega)|^2 on the wave grid.
SpectrumSamples external_spectrum(const SpectrumSamples& wave, const RaoTable& rao);

/// Squared gain from the white-noise input to x3:
///   gamma^2 w^4 / ((w^4 - v2 w^2 + v0)^2 + (v1 w - v3 w^3)^2)
double filter_gain_sq(const FilterParams& filt, double omega);

struct FitOptions {
  int max_iters = 200;
  /// Fit log ordinates instead of linear ones (requires a strictly positive target).
  bool log_weighting = false;
};

struct FitReport {
  FilterParams params;
  double rms_residual = 0.0;  ///< RMS of the final residual vector
  int iterations = 0;         ///< accepted steps
  bool converged = false;
  std::vector<double> cost_history;  ///< RMS residual after each accepted step, starting with init
};

/// No step from the current point both reduces the residual and keeps the
/// filter Hurwitz. Carries the best parameters found.
class FitFailure : public std::runtime_error {
 public:
  FitFailure(const std::string& what, FitReport best) : std::runtime_error(what), best_(std::move(best)) {}
  const FitReport& best() const noexcept { return best_; }

 private:
  FitReport best_;
};

/// Damped least-squares (Levenberg-Marquardt, central-difference Jacobian)
/// fit of (v0, v1, v2, v3, gamma) to a target spectrum. Steps that leave the
/// Hurwitz region are rejected, so the result is always stable.
FitReport fit_filter(const SpectrumSamples& target, const FilterParams& init, const FitOptions& options = {});

/// Starting point for fitting an arbitrary single-peaked target: two
/// identical pole pairs at the target's peak frequency, gain matched at the peak.
FilterParams initial_filter_guess(const SpectrumSamples& target);

/// sqrt(sum (gain - target)^2 / sum target^2) over target points with omega in [lo, hi].
double relative_rms_error(const FilterParams& filt, const SpectrumSamples& target, double lo, double hi);

}  // namespace shiproll
