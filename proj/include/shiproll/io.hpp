#pragma once

// JSON and CSV formats for parameters, spectra, trajectories, densities and
// analysis reports. JSON objects reject unknown keys. Numbers in CSV files are
// written with 17 significant digits so files round-trip bit-exactly.

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiproll/convergence.hpp"
#include "shiproll/density.hpp"
#include "shiproll/fpk2d.hpp"
#include "shiproll/model.hpp"
#include "shiproll/sde.hpp"
#include "shiproll/spectrum.hpp"

namespace shiproll {

using Json = nlohmann::json;

/// Malformed or invalid input file; the message names the file, field or line.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void to_json(Json& j, const ShipParams& ship);
void from_json(const Json& j, ShipParams& ship);
void to_json(Json& j, const FilterParams& filt);
void from_json(const Json& j, FilterParams& filt);
void to_json(Json& j, const WaveParams& wave);
void from_json(const Json& j, WaveParams& wave);
void to_json(Json& j, const SimConfig& cfg);
void from_json(const Json& j, SimConfig& cfg);
void to_json(Json& j, const Reduced2DModel& model);
void from_json(const Json& j, Reduced2DModel& model);
void to_json(Json& j, const Grid2D& grid);
void from_json(const Json& j, Grid2D& grid);
void to_json(Json& j, const Axis& axis);
void from_json(const Json& j, Axis& axis);

Json report_json(const FitReport& report);
Json report_json(const DecayFit& fit);
Json report_json(const HazardReport& report);
Json report_json(const H1Report& report);
/// {n_paths, n_capsized, capsize_times}
Json ensemble_summary(const Ensemble& e);
/// {axes, out_of_range_fraction, n_samples}
Json density_sidecar(const DensityGrid& grid);

/// Throws InputError naming the first key of j not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context);

/// Field accessors for config parsing. Missing keys give the fallback; keys of
/// the wrong type throw InputError naming ctx.key.
double number(const Json& j, const char* key, const std::string& ctx);
double number_or(const Json& j, const char* key, double fallback, const std::string& ctx);
std::uint64_t count_or(const Json& j, const char* key, std::uint64_t fallback, const std::string& ctx);
bool bool_or(const Json& j, const char* key, bool fallback, const std::string& ctx);
std::string string_or(const Json& j, const char* key, const std::string& fallback, const std::string& ctx);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

std::string format_number(double v);

/// CSV with header `omega,value`.
SpectrumSamples read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSamples& s);
RaoTable read_rao_csv(const std::filesystem::path& path);
void write_rao_csv(const std::filesystem::path& path, const RaoTable& rao);

/// Header `t,x1,x2,x3,x4,x5,x6`.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
/// `x,p` for one axis, `x,y,p` row-major for two, at cell centers.
void write_density_csv(const std::filesystem::path& path, const DensityGrid& grid);
/// `x1,x2,p` row-major at cell centers.
void write_field_csv(const std::filesystem::path& path, const Field2D& field);
/// `t,distance`
void write_distance_csv(const std::filesystem::path& path, std::span<const DistanceSample> series);
/// Two-column CSV with the given header names.
void write_columns_csv(const std::filesystem::path& path, const std::string& x_name, std::span<const double> xs,
                       const std::string& y_name, std::span<const double> ys);

}  // namespace shiproll
