#pragma once

// Euler-Maruyama integration of the six-state roll system and ensembles of
// independent paths with an absorbing capsize boundary at |x1| >= phi_v.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shiproll/model.hpp"

namespace shiproll {

struct SimConfig {
  double dt = 0.01;
  double t_end = 100.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  State6 initial{};
  /// Per-component standard deviations of a Gaussian spread around `initial`.
  std::optional<std::array<double, 6>> initial_std;
  std::size_t record_stride = 1;
  /// Worker threads for ensembles; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

void validate(const SimConfig& cfg);

/// Number of Euler-Maruyama steps, round(t_end / dt).
std::size_t step_count(const SimConfig& cfg);

struct Trajectory {
  std::vector<double> times;
  std::vector<State6> states;
  /// First time |x1| >= phi_v. When set, the last record is the capsized state.
  std::optional<double> capsize_time;
};

struct Ensemble {
  SimConfig config;
  std::vector<Trajectory> trajectories;
};

/// s + dt F(s) + gamma sqrt(dt) xi e4.
State6 step_em(const ShipParams& ship, const FilterParams& filt, const State6& s, double dt, double xi);

/// Integrates one path. The random stream is addressed by (cfg.seed, path_index).
/// Throws IntegrationBlowup if the state becomes non-finite.
Trajectory simulate_path(const ShipParams& ship, const FilterParams& filt, const SimConfig& cfg,
                         std::size_t path_index);

/// Independent paths 0..n_paths-1; identical for any thread count.
Ensemble simulate_ensemble(const ShipParams& ship, const FilterParams& filt, const SimConfig& cfg);

/// Fraction of paths with capsize_time <= t for each t. Times must lie in [0, t_end].
std::vector<double> first_passage_curve(const Ensemble& e, std::span<const double> times);

/// Capsize times of the capsized paths, in path order.
std::vector<double> capsize_times(const Ensemble& e);

/// Ensemble integration of the reduced two-state model.
struct ReducedSimConfig {
  double dt = 0.005;
  double t_end = 100.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  std::array<double, 2> initial{};
  /// Specular walls at |x1| = reflect_at: (x1, x2) -> (2w - x1, -x2).
  std::optional<double> reflect_at;
  unsigned threads = 0;
};

void validate(const ReducedSimConfig& cfg);

/// Terminal (x1, x2) of every path, in path order.
std::vector<std::array<double, 2>> simulate_reduced_terminal(const Reduced2DModel& model,
                                                             const ReducedSimConfig& cfg);

}  // namespace shiproll
