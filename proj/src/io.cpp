#include "shiproll/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shiproll {

namespace {

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(ctx + ": missing field '" + key + "'");
  return *it;
}

double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + " must be a number");
  return v.get<double>();
}

std::array<double, 6> vec6(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 6) throw InputError(where + " must be an array of 6 numbers");
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) out[i] = as_number(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

void require_object(const Json& j, const std::string& ctx) {
  if (!j.is_object()) throw InputError(ctx + " must be a JSON object");
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

// Reads a two-column CSV with the exact header "omega,<second>".
std::pair<std::vector<double>, std::vector<double>> read_two_columns(const std::filesystem::path& path,
                                                                     const std::string& header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> xs, ys;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!seen_header) {
      if (line != header) throw InputError(where + ": expected header '" + header + "', got '" + line + "'");
      seen_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw InputError(where + ": expected two comma-separated values");
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double x = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      const double y = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      xs.push_back(x);
      ys.push_back(y);
    } catch (const std::exception&) {
      throw InputError(where + ": malformed number in '" + line + "'");
    }
  }
  if (!seen_header) throw InputError(path.string() + ": empty file, expected header '" + header + "'");
  return {std::move(xs), std::move(ys)};
}

}  // namespace

double number(const Json& j, const char* key, const std::string& ctx) {
  return as_number(field(j, key, ctx), ctx + "." + key);
}

double number_or(const Json& j, const char* key, double fallback, const std::string& ctx) {
  return j.contains(key) ? number(j, key, ctx) : fallback;
}

std::uint64_t count_or(const Json& j, const char* key, std::uint64_t fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw InputError(ctx + "." + key + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool bool_or(const Json& j, const char* key, bool fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw InputError(ctx + "." + key + " must be true or false");
  return j.at(key).get<bool>();
}

std::string string_or(const Json& j, const char* key, const std::string& fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw InputError(ctx + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  require_object(j, context);
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw InputError(context + ": unknown field '" + key + "'");
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Parameters

void to_json(Json& j, const ShipParams& ship) {
  j = Json{{"lambda1", ship.lambda1},
           {"damping_form", ship.damping_form == DampingForm::QuadraticAbs ? "QuadraticAbs" : "Cubic"},
           {"lambda2", ship.lambda2},
           {"lambda3", ship.lambda3},
           {"c1", ship.c1},
           {"c3", ship.c3},
           {"c5", ship.c5},
           {"phi_v", ship.phi_v}};
  if (ship.ixx) j["ixx"] = *ship.ixx;
  if (ship.omega0) j["omega0"] = *ship.omega0;
}

void from_json(const Json& j, ShipParams& ship) {
  const std::string ctx = "ship";
  reject_unknown_keys(j, {"lambda1", "damping_form", "lambda2", "lambda3", "c1", "c3", "c5", "phi_v", "ixx", "omega0"},
                      ctx);
  ShipParams s;
  s.lambda1 = number_or(j, "lambda1", s.lambda1, ctx);
  if (j.contains("damping_form")) {
    const Json& form = j.at("damping_form");
    if (form == "QuadraticAbs") {
      s.damping_form = DampingForm::QuadraticAbs;
    } else if (form == "Cubic") {
      s.damping_form = DampingForm::Cubic;
    } else {
      throw InputError("ship.damping_form must be \"QuadraticAbs\" or \"Cubic\"");
    }
  }
  s.lambda2 = number_or(j, "lambda2", s.lambda2, ctx);
  s.lambda3 = number_or(j, "lambda3", s.lambda3, ctx);
  s.c1 = number_or(j, "c1", s.c1, ctx);
  s.c3 = number_or(j, "c3", s.c3, ctx);
  s.c5 = number_or(j, "c5", s.c5, ctx);
  if (j.contains("phi_v")) {
    s.phi_v = number(j, "phi_v", ctx);
  } else if (const auto root = vanishing_angle(s.c1, s.c3, s.c5)) {
    s.phi_v = *root;
  } else {
    throw InputError("ship.phi_v is required when c(phi) has no positive root");
  }
  if (j.contains("ixx") && !j.at("ixx").is_null()) s.ixx = number(j, "ixx", ctx);
  if (j.contains("omega0") && !j.at("omega0").is_null()) s.omega0 = number(j, "omega0", ctx);
  validate(s);
  ship = s;
}

void to_json(Json& j, const FilterParams& filt) {
  j = Json{{"v0", filt.v0}, {"v1", filt.v1}, {"v2", filt.v2}, {"v3", filt.v3}, {"gamma", filt.gamma}};
}

void from_json(const Json& j, FilterParams& filt) {
  const std::string ctx = "filter";
  reject_unknown_keys(j, {"v0", "v1", "v2", "v3", "gamma"}, ctx);
  FilterParams f;
  f.v0 = number_or(j, "v0", f.v0, ctx);
  f.v1 = number_or(j, "v1", f.v1, ctx);
  f.v2 = number_or(j, "v2", f.v2, ctx);
  f.v3 = number_or(j, "v3", f.v3, ctx);
  // gamma = 0 is allowed on input to switch the noise off.
  f.gamma = number_or(j, "gamma", f.gamma, ctx);
  if (!(std::isfinite(f.gamma) && f.gamma >= 0.0)) throw InputError("filter.gamma must be >= 0");
  if (!(std::isfinite(f.v0) && std::isfinite(f.v1) && std::isfinite(f.v2) && std::isfinite(f.v3)))
    throw InputError("filter coefficients must be finite");
  filt = f;
}

void to_json(Json& j, const WaveParams& wave) { j = Json{{"hs", wave.hs}, {"g", wave.g}}; }

void from_json(const Json& j, WaveParams& wave) {
  reject_unknown_keys(j, {"hs", "g"}, "wave");
  WaveParams w;
  w.hs = number_or(j, "hs", w.hs, "wave");
  w.g = number_or(j, "g", w.g, "wave");
  validate(w);
  wave = w;
}

void to_json(Json& j, const SimConfig& cfg) {
  j = Json{{"dt", cfg.dt},
           {"t_end", cfg.t_end},
           {"n_paths", cfg.n_paths},
           {"seed", cfg.seed},
           {"initial", cfg.initial.x},
           {"record_stride", cfg.record_stride},
           {"threads", cfg.threads}};
  if (cfg.initial_std) j["initial_std"] = *cfg.initial_std;
}

void from_json(const Json& j, SimConfig& cfg) {
  const std::string ctx = "sim";
  reject_unknown_keys(j, {"dt", "t_end", "n_paths", "seed", "initial", "initial_std", "record_stride", "threads"}, ctx);
  SimConfig c;
  c.dt = number_or(j, "dt", c.dt, ctx);
  c.t_end = number_or(j, "t_end", c.t_end, ctx);
  c.n_paths = count_or(j, "n_paths", c.n_paths, ctx);
  c.seed = count_or(j, "seed", c.seed, ctx);
  if (j.contains("initial")) c.initial.x = vec6(j.at("initial"), ctx + ".initial");
  if (j.contains("initial_std") && !j.at("initial_std").is_null())
    c.initial_std = vec6(j.at("initial_std"), ctx + ".initial_std");
  c.record_stride = count_or(j, "record_stride", c.record_stride, ctx);
  c.threads = static_cast<unsigned>(count_or(j, "threads", c.threads, ctx));
  validate(c);
  cfg = c;
}

void to_json(Json& j, const Reduced2DModel& model) { j = Json{{"ship", model.ship}, {"sigma", model.sigma}}; }

void from_json(const Json& j, Reduced2DModel& model) {
  reject_unknown_keys(j, {"ship", "sigma"}, "model");
  Reduced2DModel m;
  if (j.contains("ship")) m.ship = j.at("ship").get<ShipParams>();
  m.sigma = number_or(j, "sigma", m.sigma, "model");
  validate(m);
  model = m;
}

void to_json(Json& j, const Grid2D& grid) {
  j = Json{{"x1_min", grid.x1_min}, {"x1_max", grid.x1_max}, {"x2_min", grid.x2_min},
           {"x2_max", grid.x2_max}, {"n1", grid.n1},         {"n2", grid.n2}};
}

void from_json(const Json& j, Grid2D& grid) {
  const std::string ctx = "grid";
  reject_unknown_keys(j, {"x1_min", "x1_max", "x2_min", "x2_max", "n1", "n2"}, ctx);
  Grid2D g;
  g.x1_min = number(j, "x1_min", ctx);
  g.x1_max = number(j, "x1_max", ctx);
  g.x2_max = number(j, "x2_max", ctx);
  g.x2_min = number_or(j, "x2_min", -g.x2_max, ctx);
  g.n1 = count_or(j, "n1", g.n1, ctx);
  g.n2 = count_or(j, "n2", g.n2, ctx);
  validate(g);
  grid = g;
}

void to_json(Json& j, const Axis& axis) { j = Json{{"min", axis.min}, {"max", axis.max}, {"n_bins", axis.n_bins}}; }

void from_json(const Json& j, Axis& axis) {
  reject_unknown_keys(j, {"min", "max", "n_bins"}, "axis");
  Axis a;
  a.min = number(j, "min", "axis");
  a.max = number(j, "max", "axis");
  a.n_bins = count_or(j, "n_bins", a.n_bins, "axis");
  validate(a);
  axis = a;
}

// ---------------------------------------------------------------------------
// Reports

Json report_json(const FitReport& report) {
  return Json{{"params", report.params},
              {"rms_residual", report.rms_residual},
              {"iterations", report.iterations},
              {"converged", report.converged}};
}

Json report_json(const DecayFit& fit) {
  return Json{{"alpha_hat", fit.alpha_hat},
              {"intercept", fit.intercept},
              {"r_squared", fit.r_squared},
              {"window", {fit.window_start, fit.window_end}},
              {"n_points", fit.n_points},
              {"convention", std::string(to_string(fit.convention))}};
}

Json report_json(const HazardReport& report) {
  return Json{{"rate_hat", report.rate_hat},
              {"max_relative_deviation", report.max_relative_deviation},
              {"interval_rates", report.interval_rates},
              {"interval_events", report.interval_events},
              {"interval_exposure", report.interval_exposure},
              {"n_events", report.n_events},
              {"window", {report.window_start, report.window_end}}};
}

Json report_json(const H1Report& report) {
  return Json{{"min_div", report.min_div}, {"argmin", report.argmin.x}, {"satisfied", report.satisfied}};
}

Json ensemble_summary(const Ensemble& e) {
  const std::vector<double> times = capsize_times(e);
  return Json{{"n_paths", e.trajectories.size()}, {"n_capsized", times.size()}, {"capsize_times", times}};
}

Json density_sidecar(const DensityGrid& grid) {
  return Json{{"axes", grid.axes}, {"out_of_range_fraction", grid.out_of_range_fraction}, {"n_samples", grid.n_samples}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV

SpectrumSamples read_spectrum_csv(const std::filesystem::path& path) {
  auto [xs, ys] = read_two_columns(path, "omega,value");
  SpectrumSamples s{std::move(xs), std::move(ys)};
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return s;
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSamples& s) {
  write_columns_csv(path, "omega", s.omegas, "value", s.values);
}

RaoTable read_rao_csv(const std::filesystem::path& path) {
  auto [xs, ys] = read_two_columns(path, "omega,value");
  RaoTable rao{std::move(xs), std::move(ys)};
  try {
    validate(rao);
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return rao;
}

void write_rao_csv(const std::filesystem::path& path, const RaoTable& rao) {
  write_columns_csv(path, "omega", rao.omegas, "value", rao.magnitudes);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_for_write(path);
  out << "t,x1,x2,x3,x4,x5,x6\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_number(traj.times[k]);
    for (double v : traj.states[k].x) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_density_csv(const std::filesystem::path& path, const DensityGrid& grid) {
  auto out = open_for_write(path);
  if (grid.dims() == 1) {
    out << "x,p\n";
    for (std::size_t i = 0; i < grid.axes[0].n_bins; ++i)
      out << format_number(grid.axes[0].center(i)) << ',' << format_number(grid.at(i)) << '\n';
  } else {
    out << "x,y,p\n";
    for (std::size_t i = 0; i < grid.axes[0].n_bins; ++i)
      for (std::size_t j = 0; j < grid.axes[1].n_bins; ++j)
        out << format_number(grid.axes[0].center(i)) << ',' << format_number(grid.axes[1].center(j)) << ','
            << format_number(grid.at(i, j)) << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const Field2D& field) {
  auto out = open_for_write(path);
  out << "x1,x2,p\n";
  for (std::size_t i = 0; i < field.grid.n1; ++i)
    for (std::size_t j = 0; j < field.grid.n2; ++j)
      out << format_number(field.grid.x1(i)) << ',' << format_number(field.grid.x2(j)) << ','
          << format_number(field.at(i, j)) << '\n';
}

void write_distance_csv(const std::filesystem::path& path, std::span<const DistanceSample> series) {
  auto out = open_for_write(path);
  out << "t,distance\n";
  for (const auto& s : series) out << format_number(s.t) << ',' << format_number(s.distance) << '\n';
}

void write_columns_csv(const std::filesystem::path& path, const std::string& x_name, std::span<const double> xs,
                       const std::string& y_name, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("write_columns_csv: column lengths differ");
  auto out = open_for_write(path);
  out << x_name << ',' << y_name << '\n';
  for (std::size_t k = 0; k < xs.size(); ++k) out << format_number(xs[k]) << ',' << format_number(ys[k]) << '\n';
}

}  // namespace shiproll
