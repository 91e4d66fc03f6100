#include "shiproll/sde.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "shiproll/errors.hpp"
#include "shiproll/parallel.hpp"
#include "shiproll/rng.hpp"

namespace shiproll {

void validate(const SimConfig& cfg) {
  if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) throw std::invalid_argument("sim.dt must be > 0");
  if (!(std::isfinite(cfg.t_end) && cfg.t_end >= cfg.dt)) throw std::invalid_argument("sim.t_end must be >= sim.dt");
  if (cfg.n_paths < 1) throw std::invalid_argument("sim.n_paths must be >= 1");
  if (cfg.record_stride < 1) throw std::invalid_argument("sim.record_stride must be >= 1");
  if (!cfg.initial.finite()) throw std::invalid_argument("sim.initial must be finite");
  if (cfg.initial_std) {
    for (double s : *cfg.initial_std) {
      if (!(std::isfinite(s) && s >= 0.0)) throw std::invalid_argument("sim.initial_std entries must be >= 0");
    }
  }
}

std::size_t step_count(const SimConfig& cfg) { return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt)); }

State6 step_em(const ShipParams& ship, const FilterParams& filt, const State6& s, double dt, double xi) {
  const Vec6 f = drift(ship, filt, s);
  State6 out;
  for (std::size_t i = 0; i < 6; ++i) out[i] = s[i] + dt * f[i];
  out[kFilter4] += filt.gamma * std::sqrt(dt) * xi;
  return out;
}

Trajectory simulate_path(const ShipParams& ship, const FilterParams& filt, const SimConfig& cfg,
                         std::size_t path_index) {
  validate(cfg);
  NormalStream noise(cfg.seed, path_index);

  State6 s = cfg.initial;
  if (cfg.initial_std) {
    for (std::size_t i = 0; i < 6; ++i) s[i] += (*cfg.initial_std)[i] * noise.next();
  }

  const std::size_t n_steps = step_count(cfg);
  Trajectory traj;
  traj.times.reserve(n_steps / cfg.record_stride + 2);
  traj.states.reserve(n_steps / cfg.record_stride + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(s);
  if (std::abs(s.roll()) >= ship.phi_v) {
    traj.capsize_time = 0.0;
    return traj;
  }

  for (std::size_t k = 1; k <= n_steps; ++k) {
    s = step_em(ship, filt, s, cfg.dt, noise.next());
    const double t = static_cast<double>(k) * cfg.dt;
    if (!s.finite()) throw IntegrationBlowup(path_index, t, "non-finite state");
    if (std::abs(s.roll()) >= ship.phi_v) {
      traj.times.push_back(t);
      traj.states.push_back(s);
      traj.capsize_time = t;
      return traj;
    }
    if (k % cfg.record_stride == 0) {
      traj.times.push_back(t);
      traj.states.push_back(s);
    }
  }
  return traj;
}

Ensemble simulate_ensemble(const ShipParams& ship, const FilterParams& filt, const SimConfig& cfg) {
  validate(cfg);
  if (!is_hurwitz(filt)) std::cerr << "warning: filter is not Hurwitz; the excitation is not stationary\n";
  Ensemble e;
  e.config = cfg;
  e.trajectories.resize(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads,
               [&](std::size_t i) { e.trajectories[i] = simulate_path(ship, filt, cfg, i); });
  return e;
}

std::vector<double> first_passage_curve(const Ensemble& e, std::span<const double> times) {
  std::vector<double> sorted = capsize_times(e);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(e.trajectories.size());
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0 && t <= e.config.t_end + 1e-12 * e.config.t_end))
      throw std::invalid_argument("first_passage_curve: time " + format_g(t) + " outside [0, t_end]");
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    out.push_back(n > 0.0 ? static_cast<double>(count) / n : 0.0);
  }
  return out;
}

std::vector<double> capsize_times(const Ensemble& e) {
  std::vector<double> out;
  for (const auto& tr : e.trajectories) {
    if (tr.capsize_time) out.push_back(*tr.capsize_time);
  }
  return out;
}

void validate(const ReducedSimConfig& cfg) {
  if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(std::isfinite(cfg.t_end) && cfg.t_end >= cfg.dt)) throw std::invalid_argument("t_end must be >= dt");
  if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (cfg.reflect_at && !(*cfg.reflect_at > 0.0)) throw std::invalid_argument("reflect_at must be > 0");
  if (cfg.reflect_at && std::abs(cfg.initial[0]) > *cfg.reflect_at)
    throw std::invalid_argument("initial x1 lies outside the reflecting walls");
}

std::vector<std::array<double, 2>> simulate_reduced_terminal(const Reduced2DModel& model,
                                                             const ReducedSimConfig& cfg) {
  validate(model);
  validate(cfg);
  const std::size_t n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  const double dt = cfg.dt;
  const double noise_scale = model.sigma * std::sqrt(dt);
  const ShipParams& ship = model.ship;
  const bool quadratic = ship.damping_form == DampingForm::QuadraticAbs;
  const double wall = cfg.reflect_at.value_or(0.0);

  std::vector<std::array<double, 2>> out(cfg.n_paths);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t path) {
    NormalStream noise(cfg.seed, path);
    double x1 = cfg.initial[0], x2 = cfg.initial[1];
    for (std::size_t k = 1; k <= n_steps; ++k) {
      const double p2 = x1 * x1;
      const double c = x1 * (ship.c1 + p2 * (ship.c3 + p2 * ship.c5));
      const double d = quadratic ? ship.lambda2 * x2 * std::abs(x2) : ship.lambda3 * x2 * x2 * x2;
      const double a = -ship.lambda1 * x2 - d - c;
      x1 += dt * x2;
      x2 += dt * a + noise_scale * noise.next();
      if (!std::isfinite(x1) || !std::isfinite(x2))
        throw IntegrationBlowup(path, static_cast<double>(k) * dt, "non-finite reduced state");
      if (cfg.reflect_at) {
        while (std::abs(x1) > wall) {
          x1 = std::copysign(2.0 * wall, x1) - x1;
          x2 = -x2;
        }
      }
    }
    out[path] = {x1, x2};
  });
  return out;
}

}  // namespace shiproll
