#include "shiproll/cli.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <CLI11.hpp>

#include "shiproll/convergence.hpp"
#include "shiproll/errors.hpp"

namespace shiproll {

namespace fs = std::filesystem;

namespace {

std::array<double, 2> pair_of(const Json& j, const char* key, const std::string& ctx) {
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw InputError(ctx + "." + key + " must be an array of 2 numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

std::string entry_name(std::size_t k, std::size_t width) {
  std::string s = std::to_string(k);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = n == 1 ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  if (n > 1) out.back() = hi;
  return out;
}

double sim_end(const SimConfig& sim) { return static_cast<double>(step_count(sim)) * sim.dt; }

}  // namespace

// ---------------------------------------------------------------------------
// Config sections

void to_json(Json& j, const SpectrumSection& s) {
  j = Json{{"omega_min", s.omega_min},   {"omega_max", s.omega_max},         {"n_omega", s.n_omega},
           {"init_from_config", s.init_from_config}, {"log_weighting", s.log_weighting}, {"max_iters", s.max_iters}};
  if (s.rao_csv) j["rao_csv"] = *s.rao_csv;
}

void from_json(const Json& j, SpectrumSection& s) {
  const std::string ctx = "spectrum";
  reject_unknown_keys(j, {"omega_min", "omega_max", "n_omega", "rao_csv", "init_from_config", "log_weighting",
                          "max_iters"},
                      ctx);
  SpectrumSection r;
  r.omega_min = number_or(j, "omega_min", r.omega_min, ctx);
  r.omega_max = number_or(j, "omega_max", r.omega_max, ctx);
  r.n_omega = count_or(j, "n_omega", r.n_omega, ctx);
  if (j.contains("rao_csv")) r.rao_csv = string_or(j, "rao_csv", "", ctx);
  r.init_from_config = bool_or(j, "init_from_config", r.init_from_config, ctx);
  r.log_weighting = bool_or(j, "log_weighting", r.log_weighting, ctx);
  r.max_iters = static_cast<int>(count_or(j, "max_iters", static_cast<std::uint64_t>(r.max_iters), ctx));
  require(std::isfinite(r.omega_min) && r.omega_min > 0.0, "spectrum.omega_min must be > 0");
  require(std::isfinite(r.omega_max) && r.omega_max > r.omega_min, "spectrum.omega_max must exceed omega_min");
  require(r.n_omega >= 5, "spectrum.n_omega must be >= 5");
  require(r.max_iters >= 1, "spectrum.max_iters must be >= 1");
  s = r;
}

void to_json(Json& j, const DensitySection& s) {
  j = Json{{"dims", s.dims}, {"n_bins", s.n_bins}};
  if (s.t) j["t"] = *s.t;
  if (s.axes) j["axes"] = *s.axes;
}

void from_json(const Json& j, DensitySection& s) {
  const std::string ctx = "density";
  reject_unknown_keys(j, {"t", "dims", "n_bins", "axes"}, ctx);
  DensitySection r;
  if (j.contains("t")) r.t = number(j, "t", ctx);
  if (j.contains("dims")) {
    const Json& d = j.at("dims");
    require(d.is_array(), "density.dims must be an array of state indices");
    r.dims.clear();
    for (const Json& v : d) {
      require(v.is_number_unsigned(), "density.dims entries must be integers in 0..5");
      r.dims.push_back(v.get<std::size_t>());
    }
  }
  r.n_bins = count_or(j, "n_bins", r.n_bins, ctx);
  if (j.contains("axes")) {
    require(j.at("axes").is_array(), "density.axes must be an array of axes");
    r.axes = j.at("axes").get<std::vector<Axis>>();
  }
  require(!r.dims.empty() && r.dims.size() <= 2, "density.dims must name one or two state components");
  for (std::size_t d : r.dims) require(d < 6, "density.dims entries must be integers in 0..5");
  require(r.n_bins >= 1, "density.n_bins must be >= 1");
  require(!r.axes || r.axes->size() == r.dims.size(), "density.axes must have one entry per dims entry");
  require(!r.t || (std::isfinite(*r.t) && *r.t >= 0.0), "density.t must be >= 0");
  s = r;
}

void to_json(Json& j, const FpkSection& s) {
  j = Json{{"sigma", s.sigma},
           {"n1", s.n1},
           {"n2", s.n2},
           {"x2_half_width_stds", s.x2_half_width_stds},
           {"t_end", s.t_end},
           {"sample_every", s.sample_every},
           {"initial", s.initial},
           {"initial_mean", s.initial_mean},
           {"reference", s.reference},
           {"steady_tol", s.steady_tol},
           {"steady_t_max", s.steady_t_max},
           {"fit_window", s.fit_window},
           {"log_floor_rel", s.log_floor_rel}};
  if (s.grid) j["grid"] = *s.grid;
  if (s.dt) j["dt"] = *s.dt;
  if (s.initial_sd) j["initial_sd"] = *s.initial_sd;
}

void from_json(const Json& j, FpkSection& s) {
  const std::string ctx = "fpk2d";
  reject_unknown_keys(j, {"sigma", "grid", "n1", "n2", "x2_half_width_stds", "dt", "t_end", "sample_every", "initial",
                          "initial_mean", "initial_sd", "reference", "steady_tol", "steady_t_max", "fit_window",
                          "log_floor_rel"},
                      ctx);
  FpkSection r;
  r.sigma = number_or(j, "sigma", r.sigma, ctx);
  if (j.contains("grid")) r.grid = j.at("grid").get<Grid2D>();
  r.n1 = count_or(j, "n1", r.n1, ctx);
  r.n2 = count_or(j, "n2", r.n2, ctx);
  r.x2_half_width_stds = number_or(j, "x2_half_width_stds", r.x2_half_width_stds, ctx);
  if (j.contains("dt")) r.dt = number(j, "dt", ctx);
  r.t_end = number_or(j, "t_end", r.t_end, ctx);
  r.sample_every = number_or(j, "sample_every", r.sample_every, ctx);
  r.initial = string_or(j, "initial", r.initial, ctx);
  if (j.contains("initial_mean")) r.initial_mean = pair_of(j, "initial_mean", ctx);
  if (j.contains("initial_sd")) r.initial_sd = pair_of(j, "initial_sd", ctx);
  r.reference = string_or(j, "reference", r.reference, ctx);
  r.steady_tol = number_or(j, "steady_tol", r.steady_tol, ctx);
  r.steady_t_max = number_or(j, "steady_t_max", r.steady_t_max, ctx);
  if (j.contains("fit_window")) r.fit_window = pair_of(j, "fit_window", ctx);
  r.log_floor_rel = number_or(j, "log_floor_rel", r.log_floor_rel, ctx);

  require(std::isfinite(r.sigma) && r.sigma > 0.0, "fpk2d.sigma must be > 0");
  require(r.n1 >= 3 && r.n2 >= 3, "fpk2d.n1 and fpk2d.n2 must be >= 3");
  require(std::isfinite(r.x2_half_width_stds) && r.x2_half_width_stds > 0.0, "fpk2d.x2_half_width_stds must be > 0");
  require(!r.dt || (std::isfinite(*r.dt) && *r.dt > 0.0), "fpk2d.dt must be > 0");
  require(std::isfinite(r.t_end) && r.t_end > 0.0, "fpk2d.t_end must be > 0");
  require(std::isfinite(r.sample_every) && r.sample_every > 0.0, "fpk2d.sample_every must be > 0");
  require(r.initial == "gaussian" || r.initial == "reference", "fpk2d.initial must be \"gaussian\" or \"reference\"");
  require(!r.initial_sd || ((*r.initial_sd)[0] > 0.0 && (*r.initial_sd)[1] > 0.0), "fpk2d.initial_sd must be > 0");
  require(r.reference == "evolved" || r.reference == "analytic", "fpk2d.reference must be \"evolved\" or \"analytic\"");
  require(r.steady_tol > 0.0, "fpk2d.steady_tol must be > 0");
  require(r.steady_t_max > 0.0, "fpk2d.steady_t_max must be > 0");
  require(r.fit_window[0] >= 0.0 && r.fit_window[1] > r.fit_window[0], "fpk2d.fit_window must be [start, end] with end > start");
  require(r.fit_window[1] <= r.t_end, "fpk2d.fit_window must end by fpk2d.t_end");
  require(r.log_floor_rel >= 0.0, "fpk2d.log_floor_rel must be >= 0");
  s = r;
}

void to_json(Json& j, const CapsizeSection& s) {
  j = Json{{"t_start", s.t_start},
           {"n_intervals", s.n_intervals},
           {"min_events", s.min_events},
           {"max_deviation", s.max_deviation}};
  if (s.t_end) j["t_end"] = *s.t_end;
}

void from_json(const Json& j, CapsizeSection& s) {
  const std::string ctx = "capsize";
  reject_unknown_keys(j, {"t_start", "t_end", "n_intervals", "min_events", "max_deviation"}, ctx);
  CapsizeSection r;
  r.t_start = number_or(j, "t_start", r.t_start, ctx);
  if (j.contains("t_end")) r.t_end = number(j, "t_end", ctx);
  r.n_intervals = count_or(j, "n_intervals", r.n_intervals, ctx);
  r.min_events = count_or(j, "min_events", r.min_events, ctx);
  r.max_deviation = number_or(j, "max_deviation", r.max_deviation, ctx);
  require(std::isfinite(r.t_start) && r.t_start >= 0.0, "capsize.t_start must be >= 0");
  require(!r.t_end || *r.t_end > r.t_start, "capsize.t_end must exceed capsize.t_start");
  require(r.n_intervals >= 1, "capsize.n_intervals must be >= 1");
  require(r.max_deviation > 0.0, "capsize.max_deviation must be > 0");
  s = r;
}

void to_json(Json& j, const SimulateSection& s) {
  j = Json{{"write_trajectories", s.write_trajectories}, {"curve_points", s.curve_points}};
}

void from_json(const Json& j, SimulateSection& s) {
  reject_unknown_keys(j, {"write_trajectories", "curve_points"}, "simulate");
  SimulateSection r;
  r.write_trajectories = bool_or(j, "write_trajectories", r.write_trajectories, "simulate");
  r.curve_points = count_or(j, "curve_points", r.curve_points, "simulate");
  require(r.curve_points >= 2, "simulate.curve_points must be >= 2");
  s = r;
}

void to_json(Json& j, const RunConfig& cfg) {
  j = Json{{"ship", cfg.ship},         {"filter", cfg.filter},   {"sim", cfg.sim},
           {"spectrum", cfg.spectrum}, {"density", cfg.density}, {"fpk2d", cfg.fpk2d},
           {"capsize", cfg.capsize},   {"simulate", cfg.simulate}};
  if (cfg.wave) j["wave"] = *cfg.wave;
}

void from_json(const Json& j, RunConfig& cfg) {
  reject_unknown_keys(j, {"ship", "filter", "sim", "wave", "spectrum", "density", "fpk2d", "capsize", "simulate"},
                      "config");
  RunConfig r;
  if (j.contains("ship")) r.ship = j.at("ship").get<ShipParams>();
  if (j.contains("filter")) r.filter = j.at("filter").get<FilterParams>();
  if (j.contains("sim")) r.sim = j.at("sim").get<SimConfig>();
  if (j.contains("wave")) r.wave = j.at("wave").get<WaveParams>();
  if (j.contains("spectrum")) r.spectrum = j.at("spectrum").get<SpectrumSection>();
  if (j.contains("density")) r.density = j.at("density").get<DensitySection>();
  if (j.contains("fpk2d")) r.fpk2d = j.at("fpk2d").get<FpkSection>();
  if (j.contains("capsize")) r.capsize = j.at("capsize").get<CapsizeSection>();
  if (j.contains("simulate")) r.simulate = j.at("simulate").get<SimulateSection>();

  validate(r.sim);
  cfg = std::move(r);
}

RunConfig load_run_config(const fs::path& path) {
  const Json j = read_json_file(path);
  RunConfig cfg;
  try {
    cfg = j.get<RunConfig>();
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  cfg.base_dir = path.parent_path();
  return cfg;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_fit_filter(const RunConfig& cfg, const std::optional<fs::path>& target_csv, const fs::path& out_dir,
                   std::ostream& log) {
  SpectrumSamples target;
  std::string source;
  if (target_csv) {
    target = read_spectrum_csv(*target_csv);
    source = "csv";
  } else {
    const WaveParams wave = cfg.wave.value_or(WaveParams{});
    const std::vector<double> omegas = log_spaced(cfg.spectrum.omega_min, cfg.spectrum.omega_max, cfg.spectrum.n_omega);
    const RaoTable rao =
        cfg.spectrum.rao_csv ? read_rao_csv(cfg.base_dir / *cfg.spectrum.rao_csv) : unit_rao(omegas);
    target = external_spectrum(pierson_moskowitz(wave, omegas), rao);
    source = cfg.spectrum.rao_csv ? "pierson_moskowitz*rao" : "pierson_moskowitz";
  }

  const FilterParams init = cfg.spectrum.init_from_config ? cfg.filter : initial_filter_guess(target);
  const FitOptions options{cfg.spectrum.max_iters, cfg.spectrum.log_weighting};

  fs::create_directories(out_dir);
  write_spectrum_csv(out_dir / "target.csv", target);

  FitReport report;
  std::string failure;
  try {
    report = fit_filter(target, init, options);
  } catch (const FitFailure& e) {
    report = e.best();
    failure = e.what();
  }

  std::vector<double> fitted;
  for (double w : target.omegas) fitted.push_back(filter_gain_sq(report.params, w));
  write_columns_csv(out_dir / "fitted.csv", "omega", target.omegas, "value", fitted);
  write_json_file(out_dir / "filter.json", Json(report.params));

  Json rep = report_json(report);
  rep["relative_rms_error"] =
      relative_rms_error(report.params, target, target.omegas.front(), target.omegas.back());
  rep["hurwitz"] = is_hurwitz(report.params);
  rep["target"] = source;
  rep["n_points"] = target.omegas.size();
  write_json_file(out_dir / "fit_report.json", rep);

  if (!failure.empty()) {
    log << "fit-filter: " << failure << "; best parameters written\n";
    return 1;
  }
  if (!report.converged) {
    log << "fit-filter: no convergence after " << report.iterations << " iterations; best parameters written\n";
    return 1;
  }
  log << "fit-filter: converged, relative rms error " << format_number(rep["relative_rms_error"].get<double>()) << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const Ensemble e = simulate_ensemble(cfg.ship, cfg.filter, cfg.sim);
  fs::create_directories(out_dir);
  write_json_file(out_dir / "summary.json", ensemble_summary(e));

  const std::vector<double> times = linspace(0.0, sim_end(cfg.sim), cfg.simulate.curve_points);
  write_columns_csv(out_dir / "first_passage.csv", "t", times, "probability", first_passage_curve(e, times));

  if (cfg.simulate.write_trajectories) {
    const fs::path dir = out_dir / "trajectories";
    fs::create_directories(dir);
    const std::size_t width = std::to_string(e.trajectories.size() - 1).size();
    for (std::size_t k = 0; k < e.trajectories.size(); ++k)
      write_trajectory_csv(dir / ("path_" + entry_name(k, width) + ".csv"), e.trajectories[k]);
  }
  log << "simulate: " << e.trajectories.size() << " paths, " << capsize_times(e).size() << " capsized\n";
  return 0;
}

int cmd_density(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const double t = cfg.density.t.value_or(sim_end(cfg.sim));
  require(t <= sim_end(cfg.sim), "density.t must not exceed sim.t_end");
  const Ensemble e = simulate_ensemble(cfg.ship, cfg.filter, cfg.sim);
  const std::vector<Axis> axes =
      cfg.density.axes ? *cfg.density.axes : default_axes(e, t, cfg.density.dims, cfg.ship.phi_v, cfg.density.n_bins);
  const EnsembleDensity d = histogram_density(e, t, cfg.density.dims, axes);

  fs::create_directories(out_dir);
  write_density_csv(out_dir / "density.csv", d.grid);
  Json side = density_sidecar(d.grid);
  side["t"] = t;
  side["dims"] = cfg.density.dims;
  side["n_surviving"] = d.n_surviving;
  side["surviving_fraction"] = d.surviving_fraction;
  write_json_file(out_dir / "density.json", side);
  log << "density: " << d.n_surviving << " surviving paths at t=" << format_number(t) << '\n';
  return 0;
}

int cmd_converge(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const FpkSection& s = cfg.fpk2d;
  const Reduced2DModel model{cfg.ship, s.sigma};
  validate(model);
  const Grid2D grid = s.grid ? *s.grid : default_grid(model, s.n1, s.n2, s.x2_half_width_stds);
  const double dt = s.dt.value_or(default_dt(model, grid));

  auto linearized_sd = [&]() -> std::array<double, 2> {
    if (s.initial_sd) return *s.initial_sd;
    require(model.ship.lambda1 > 0.0 && model.ship.c1 > 0.0,
            "fpk2d.initial_sd is required unless lambda1 > 0 and c1 > 0");
    const double var2 = model.sigma * model.sigma / (2.0 * model.ship.lambda1);
    return {std::sqrt(var2 / model.ship.c1), std::sqrt(var2)};
  };

  Field2D reference;
  double reference_residual = 0.0;
  if (s.reference == "analytic") {
    reference = analytic_stationary(model, grid);
    reference_residual = stationary_residual(model, reference);
  } else {
    Field2D start;
    try {
      start = analytic_stationary(model, grid);
    } catch (const NoClosedFormError&) {
      const auto sd = linearized_sd();
      start = gaussian_field(grid, 0.0, 0.0, sd[0], sd[1]);
    }
    const SteadyState ss = steady_state(model, start, dt, s.steady_tol, s.steady_t_max);
    reference = ss.field;
    reference_residual = ss.residual;
  }

  Field2D p0;
  if (s.initial == "reference") {
    p0 = reference;
  } else {
    const auto sd = linearized_sd();
    p0 = gaussian_field(grid, s.initial_mean[0], s.initial_mean[1], sd[0], sd[1]);
  }

  const TrackResult track = evolve_and_track(model, p0, dt, s.t_end, reference, s.sample_every);
  fs::create_directories(out_dir);
  write_distance_csv(out_dir / "distance.csv", track.series);
  write_field_csv(out_dir / "reference.csv", reference);
  write_field_csv(out_dir / "final.csv", track.final_field);

  const Field2D zero{grid, std::vector<double>(grid.size(), 0.0)};
  const double floor = s.log_floor_rel * l2_distance(reference, zero);
  const DecayFit fit = fit_decay(track.series, s.fit_window[0], s.fit_window[1], DistanceConvention::Norm, floor);

  Json rep = report_json(fit);
  rep["dt"] = track.dt;
  rep["reference"] = s.reference;
  rep["reference_residual"] = reference_residual;
  rep["monotone_from"] = track.monotone_from ? Json(*track.monotone_from) : Json();
  rep["log_floor"] = floor;
  rep["grid"] = grid;
  write_json_file(out_dir / "decay.json", rep);
  log << "converge: alpha_hat " << format_number(fit.alpha_hat) << ", r_squared " << format_number(fit.r_squared)
      << '\n';
  return 0;
}

int cmd_capsize(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const double t_end = cfg.capsize.t_end.value_or(sim_end(cfg.sim));
  require(t_end <= sim_end(cfg.sim), "capsize.t_end must not exceed sim.t_end");
  require(cfg.capsize.t_start < t_end, "capsize.t_start must be before the window end");
  const Ensemble e = simulate_ensemble(cfg.ship, cfg.filter, cfg.sim);
  fs::create_directories(out_dir);
  write_json_file(out_dir / "summary.json", ensemble_summary(e));

  const HazardReport h =
      hazard_constancy(e, cfg.capsize.t_start, t_end, cfg.capsize.n_intervals, cfg.capsize.min_events);
  Json rep = report_json(h);
  rep["max_deviation_threshold"] = cfg.capsize.max_deviation;
  rep["constant_rate"] = h.max_relative_deviation < cfg.capsize.max_deviation;
  write_json_file(out_dir / "hazard.json", rep);
  log << "capsize: " << h.n_events << " events in window, rate " << format_number(h.rate_hat)
      << ", max relative deviation " << format_number(h.max_relative_deviation) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic ship roll toolkit"};
  app.name("shiproll");
  app.set_version_flag("--version", std::string("shiproll ") + kVersion + " (config schema " +
                                        std::to_string(kConfigSchema) + ")");
  app.require_subcommand(1);

  fs::path config_path, out_dir;
  std::optional<fs::path> target;
  std::string target_arg;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
  };
  CLI::App* fit = app.add_subcommand("fit-filter", "Fit the shaping filter to a target spectrum");
  add_common(fit);
  fit->add_option("--target", target_arg, "Target spectrum CSV (omega,value); default is the configured sea spectrum");
  CLI::App* sim = app.add_subcommand("simulate", "Simulate the six-state ensemble");
  add_common(sim);
  CLI::App* dens = app.add_subcommand("density", "Histogram density of the ensemble at one time");
  add_common(dens);
  CLI::App* conv = app.add_subcommand("converge", "Track decay of the reduced density to its steady state");
  add_common(conv);
  CLI::App* cap = app.add_subcommand("capsize", "Capsize hazard-rate constancy over a window");
  add_common(cap);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (!target_arg.empty()) target = fs::path(target_arg);

  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
    if (target && !fs::is_regular_file(*target)) throw InputError("cannot open " + target->string());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (fit->parsed()) return cmd_fit_filter(cfg, target, out_dir, out);
    if (sim->parsed()) return cmd_simulate(cfg, out_dir, out);
    if (dens->parsed()) return cmd_density(cfg, out_dir, out);
    if (conv->parsed()) return cmd_converge(cfg, out_dir, out);
    return cmd_capsize(cfg, out_dir, out);
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace shiproll
