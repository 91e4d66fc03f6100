#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shiproll/fpk2d.hpp"
#include "shiproll/model.hpp"
#include "shiproll/sde.hpp"

namespace shiproll {

/// Which quantity a decay series holds. The rate of ||P - Ps||^2 is twice the
/// rate of ||P - Ps||; fits report the rate of whatever they were given.
enum class DistanceConvention { Norm, SquaredNorm };

std::string_view to_string(DistanceConvention c);

struct DecayFit {
  double alpha_hat = 0.0;  ///< -slope of log(distance) against t
  double intercept = 0.0;
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::size_t n_points = 0;
  DistanceConvention convention = DistanceConvention::Norm;
};

/// Ordinary least squares of log(distance) on t over samples with t in
/// [t_start, t_end]. Needs at least 5 samples in the window, each above
/// min_distance; anything at or below it throws LogDomainError.
DecayFit fit_decay(std::span<const DistanceSample> series, double t_start, double t_end,
                   DistanceConvention convention = DistanceConvention::Norm, double min_distance = 0.0);

struct HazardReport {
  double rate_hat = 0.0;  ///< pooled events / exposure over the window
  double max_relative_deviation = 0.0;
  std::vector<double> interval_rates;
  std::vector<std::size_t> interval_events;
  std::vector<double> interval_exposure;
  std::size_t n_events = 0;
  double window_start = 0.0;
  double window_end = 0.0;
};

/// Piecewise-constant hazard estimate: the window is split into n_intervals
/// equal parts, each rate is events / survivor time in that part. Paths are
/// observed on [0, observed_until]; nullopt means no capsize.
/// Throws InsufficientDataError with fewer than min_events events in the window.
HazardReport hazard_constancy(std::span<const std::optional<double>> capsize_times, double observed_until,
                              double t_start, double t_end, std::size_t n_intervals = 5,
                              std::size_t min_events = 20);
HazardReport hazard_constancy(const Ensemble& e, double t_start, double t_end, std::size_t n_intervals = 5,
                              std::size_t min_events = 20);

struct StateBox {
  std::array<double, 6> lo{};
  std::array<double, 6> hi{};
};

struct H1Report {
  double min_div = 0.0;
  State6 argmin;
  bool satisfied = false;  ///< min_div > 0
};

/// Minimum of div F over the box. The divergence depends on x2 alone, so this
/// is a scan of n_samples points over [lo2, hi2] (endpoints included) followed
/// by golden-section refinement; the other coordinates of argmin are the box center.
H1Report check_h1(const ShipParams& ship, const FilterParams& filt, const StateBox& box, std::size_t n_samples);

}  // namespace shiproll
