#pragma once

// Command-line entry point. Every run is described by one JSON document; the
// flags only pick the subcommand, the config file and the output directory.
//
// Exit codes: 0 success, 1 runtime or convergence failure, 2 invalid input.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shiproll/density.hpp"
#include "shiproll/fpk2d.hpp"
#include "shiproll/io.hpp"
#include "shiproll/model.hpp"
#include "shiproll/sde.hpp"
#include "shiproll/spectrum.hpp"

namespace shiproll {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kConfigSchema = 1;

struct SpectrumSection {
  double omega_min = 0.1;
  double omega_max = 3.0;
  std::size_t n_omega = 64;
  /// CSV `omega,value`, resolved against the config file's directory. Unit RAO when absent.
  std::optional<std::string> rao_csv;
  /// Start from the `filter` section instead of the peak-matched guess.
  bool init_from_config = false;
  bool log_weighting = false;
  int max_iters = 200;
};

struct DensitySection {
  std::optional<double> t;  ///< defaults to sim.t_end
  std::vector<std::size_t> dims{0, 1};
  std::size_t n_bins = 64;
  std::optional<std::vector<Axis>> axes;
};

struct FpkSection {
  double sigma = 0.3;
  std::optional<Grid2D> grid;  ///< default_grid(n1, n2, x2_half_width_stds) when absent
  std::size_t n1 = 128;
  std::size_t n2 = 128;
  double x2_half_width_stds = 5.0;
  std::optional<double> dt;  ///< default_dt when absent
  double t_end = 60.0;
  double sample_every = 0.5;
  /// "gaussian" (offset Gaussian) or "reference" (start on the reference itself).
  std::string initial = "gaussian";
  std::array<double, 2> initial_mean{0.3, 0.0};
  std::optional<std::array<double, 2>> initial_sd;  ///< linearized stationary spread when absent
  /// "evolved" (numerical steady state) or "analytic" (closed form, linear damping only).
  std::string reference = "evolved";
  double steady_tol = 1e-12;
  double steady_t_max = 5000.0;
  std::array<double, 2> fit_window{5.0, 60.0};
  /// Distances at or below log_floor_rel * ||reference|| are rounding noise.
  double log_floor_rel = 1e-10;
};

struct CapsizeSection {
  double t_start = 20.0;
  std::optional<double> t_end;  ///< defaults to sim.t_end
  std::size_t n_intervals = 5;
  std::size_t min_events = 20;
  double max_deviation = 0.3;
};

struct SimulateSection {
  bool write_trajectories = false;
  std::size_t curve_points = 101;
};

struct RunConfig {
  ShipParams ship;
  FilterParams filter;
  SimConfig sim;
  std::optional<WaveParams> wave;
  SpectrumSection spectrum;
  DensitySection density;
  FpkSection fpk2d;
  CapsizeSection capsize;
  SimulateSection simulate;
  /// Directory relative paths in the config resolve against; not serialized.
  std::filesystem::path base_dir;
};

void to_json(Json& j, const SpectrumSection& s);
void from_json(const Json& j, SpectrumSection& s);
void to_json(Json& j, const DensitySection& s);
void from_json(const Json& j, DensitySection& s);
void to_json(Json& j, const FpkSection& s);
void from_json(const Json& j, FpkSection& s);
void to_json(Json& j, const CapsizeSection& s);
void from_json(const Json& j, CapsizeSection& s);
void to_json(Json& j, const SimulateSection& s);
void from_json(const Json& j, SimulateSection& s);
void to_json(Json& j, const RunConfig& cfg);
void from_json(const Json& j, RunConfig& cfg);

/// Reads and validates a config file. Throws InputError (or another
/// std::invalid_argument) naming the offending field.
RunConfig load_run_config(const std::filesystem::path& path);

/// Subcommands; each writes only inside out_dir and returns an exit code.
int cmd_fit_filter(const RunConfig& cfg, const std::optional<std::filesystem::path>& target_csv,
                   const std::filesystem::path& out_dir, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_density(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_converge(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_capsize(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shiproll
