#include "shiproll/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shiproll/errors.hpp"

namespace shiproll {

std::string_view to_string(DistanceConvention c) {
  return c == DistanceConvention::Norm ? "norm" : "squared_norm";
}

DecayFit fit_decay(std::span<const DistanceSample> series, double t_start, double t_end,
                   DistanceConvention convention, double min_distance) {
  if (!(t_end > t_start)) throw std::invalid_argument("fit_decay: window end must exceed window start");
  std::vector<double> ts, ys;
  for (const auto& s : series) {
    if (s.t < t_start || s.t > t_end) continue;
    if (!(s.distance > std::max(min_distance, 0.0)))
      throw LogDomainError("fit_decay: distance " + format_g(s.distance) + " at t=" + format_g(s.t) +
                           " is at or below the floor " + format_g(min_distance) + "; its logarithm is noise");
    ts.push_back(s.t);
    ys.push_back(std::log(s.distance));
  }
  if (ts.size() < 5)
    throw InsufficientDataError("fit_decay: " + std::to_string(ts.size()) + " samples in window, need at least 5");

  const double n = static_cast<double>(ts.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    t_mean += ts[k];
    y_mean += ys[k];
  }
  t_mean /= n;
  y_mean /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double dt = ts[k] - t_mean, dy = ys[k] - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw InsufficientDataError("fit_decay: all samples share one time");
  const double slope = sty / stt;

  DecayFit fit;
  fit.alpha_hat = -slope;
  fit.intercept = y_mean - slope * t_mean;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double e = ys[k] - (fit.intercept + slope * ts[k]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.window_start = ts.front();
  fit.window_end = ts.back();
  fit.n_points = ts.size();
  fit.convention = convention;
  return fit;
}

HazardReport hazard_constancy(std::span<const std::optional<double>> capsize_times, double observed_until,
                              double t_start, double t_end, std::size_t n_intervals, std::size_t min_events) {
  if (!(t_end > t_start && t_start >= 0.0)) throw std::invalid_argument("hazard_constancy: invalid window");
  if (t_end > observed_until * (1.0 + 1e-12))
    throw std::invalid_argument("hazard_constancy: window extends past the observation time");
  if (n_intervals < 1) throw std::invalid_argument("hazard_constancy: need at least one interval");

  HazardReport rep;
  rep.window_start = t_start;
  rep.window_end = t_end;
  rep.interval_events.assign(n_intervals, 0);
  rep.interval_exposure.assign(n_intervals, 0.0);
  const double width = (t_end - t_start) / static_cast<double>(n_intervals);

  for (const auto& tc : capsize_times) {
    const double exit = tc ? *tc : observed_until;
    for (std::size_t k = 0; k < n_intervals; ++k) {
      const double a = t_start + width * static_cast<double>(k);
      const double b = k + 1 == n_intervals ? t_end : a + width;
      rep.interval_exposure[k] += std::max(0.0, std::min(b, exit) - a);
      if (tc && *tc >= a && (*tc < b || (k + 1 == n_intervals && *tc <= b))) ++rep.interval_events[k];
    }
  }
  for (std::size_t e : rep.interval_events) rep.n_events += e;
  if (rep.n_events < min_events)
    throw InsufficientDataError("hazard_constancy: " + std::to_string(rep.n_events) + " capsize events in window, need " +
                                std::to_string(min_events));

  double exposure = 0.0;
  for (double x : rep.interval_exposure) exposure += x;
  rep.rate_hat = static_cast<double>(rep.n_events) / exposure;
  for (std::size_t k = 0; k < n_intervals; ++k) {
    const double rate =
        rep.interval_exposure[k] > 0.0 ? static_cast<double>(rep.interval_events[k]) / rep.interval_exposure[k] : 0.0;
    rep.interval_rates.push_back(rate);
    rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::abs(rate - rep.rate_hat) / rep.rate_hat);
  }
  return rep;
}

HazardReport hazard_constancy(const Ensemble& e, double t_start, double t_end, std::size_t n_intervals,
                              std::size_t min_events) {
  std::vector<std::optional<double>> times;
  times.reserve(e.trajectories.size());
  for (const auto& tr : e.trajectories) times.push_back(tr.capsize_time);
  const double observed = static_cast<double>(step_count(e.config)) * e.config.dt;
  return hazard_constancy(times, observed, t_start, t_end, n_intervals, min_events);
}

H1Report check_h1(const ShipParams& ship, const FilterParams& filt, const StateBox& box, std::size_t n_samples) {
  for (std::size_t i = 0; i < 6; ++i) {
    if (!(std::isfinite(box.lo[i]) && std::isfinite(box.hi[i]) && box.hi[i] >= box.lo[i]))
      throw std::invalid_argument("check_h1: box must be finite with hi >= lo");
  }
  if (n_samples < 1) throw std::invalid_argument("check_h1: n_samples must be >= 1");

  const double lo = box.lo[kRollRate], hi = box.hi[kRollRate];
  auto div = [&](double v) { return divergence_at_rate(ship, filt, v); };

  double best_v = lo;
  double best = div(lo);
  std::size_t best_k = 0;
  const std::size_t n = std::max<std::size_t>(n_samples, 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    const double d = div(v);
    if (d < best) {
      best = d;
      best_v = v;
      best_k = k;
    }
  }

  // Golden-section refinement between the neighbouring samples.
  if (hi > lo) {
    const double step = (hi - lo) / static_cast<double>(n - 1);
    double a = std::max(lo, lo + step * (static_cast<double>(best_k) - 1.0));
    double b = std::min(hi, lo + step * (static_cast<double>(best_k) + 1.0));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = div(c), fd = div(d);
    for (int it = 0; it < 100 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = div(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = div(d);
      }
    }
    for (double v : {a, b, c, d}) {
      if (div(v) < best) {
        best = div(v);
        best_v = v;
      }
    }
  }

  H1Report rep;
  rep.min_div = best;
  for (std::size_t i = 0; i < 6; ++i) rep.argmin[i] = 0.5 * (box.lo[i] + box.hi[i]);
  rep.argmin[kRollRate] = best_v;
  rep.satisfied = best > 0.0;
  return rep;
}

}  // namespace shiproll
