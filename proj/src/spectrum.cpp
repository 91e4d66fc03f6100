#include "shiproll/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "shiproll/errors.hpp"

namespace shiproll {

namespace {

void check_grid(const std::vector<double>& omegas, const std::vector<double>& values, const char* what) {
  if (omegas.size() != values.size())
    throw std::invalid_argument(std::string(what) + ": omegas and values differ in length");
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    if (!(std::isfinite(omegas[k]) && omegas[k] > 0.0))
      throw std::invalid_argument(std::string(what) + ": frequency " + std::to_string(k) + " must be > 0");
    if (k > 0 && !(omegas[k] > omegas[k - 1]))
      throw std::invalid_argument(std::string(what) + ": frequencies must be strictly increasing");
    if (!(std::isfinite(values[k]) && values[k] >= 0.0))
      throw std::invalid_argument(std::string(what) + ": value " + std::to_string(k) + " must be finite and >= 0");
  }
}

constexpr std::size_t kNumParams = 5;
using ParamVec = Eigen::Matrix<double, kNumParams, 1>;

ParamVec to_vec(const FilterParams& f) {
  ParamVec p;
  p << f.v0, f.v1, f.v2, f.v3, f.gamma;
  return p;
}

FilterParams from_vec(const ParamVec& p) { return {p[0], p[1], p[2], p[3], p[4]}; }

bool feasible(const ParamVec& p) {
  const FilterParams f = from_vec(p);
  return f.gamma > 0.0 && std::isfinite(f.gamma) && is_hurwitz(f);
}

class SpectralResidual {
 public:
  SpectralResidual(const SpectrumSamples& target, bool log_weighting)
      : target_(target), log_(log_weighting) {}

  Eigen::VectorXd operator()(const ParamVec& p) const {
    const FilterParams f = from_vec(p);
    const auto n = static_cast<Eigen::Index>(target_.omegas.size());
    Eigen::VectorXd r(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double g = filter_gain_sq(f, target_.omegas[k]);
      const double t = target_.values[k];
      r[k] = log_ ? std::log(g) - std::log(t) : g - t;
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const ParamVec& p) const {
    const auto n = static_cast<Eigen::Index>(target_.omegas.size());
    Eigen::MatrixXd jac(n, static_cast<Eigen::Index>(kNumParams));
    for (std::size_t i = 0; i < kNumParams; ++i) {
      const double h = 1e-6 * std::max(std::abs(p[i]), 1e-3);
      ParamVec hi = p, lo = p;
      hi[i] += h;
      lo[i] -= h;
      jac.col(static_cast<Eigen::Index>(i)) = ((*this)(hi) - (*this)(lo)) / (2.0 * h);
    }
    return jac;
  }

 private:
  const SpectrumSamples& target_;
  bool log_;
};

double rms(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

}  // namespace

void validate(const SpectrumSamples& s) { check_grid(s.omegas, s.values, "spectrum"); }

void validate(const RaoTable& rao) { check_grid(rao.omegas, rao.magnitudes, "rao"); }

void validate(const WaveParams& wave) {
  if (!(std::isfinite(wave.hs) && wave.hs > 0.0)) throw std::invalid_argument("wave.hs must be > 0");
  if (!(std::isfinite(wave.g) && wave.g > 0.0)) throw std::invalid_argument("wave.g must be > 0");
}

double pierson_moskowitz(const WaveParams& wave, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("pierson_moskowitz: omega must be > 0, got " + format_g(omega));
  const double a = wave.amplitude();
  const double w4 = omega * omega * omega * omega;
  return a / (w4 * omega) * std::exp(-4.0 * a / (wave.hs * wave.hs * w4));
}

SpectrumSamples pierson_moskowitz(const WaveParams& wave, std::span<const double> omegas) {
  SpectrumSamples out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.values.reserve(omegas.size());
  for (double w : omegas) out.values.push_back(pierson_moskowitz(wave, w));
  return out;
}

double pierson_moskowitz_peak(const WaveParams& wave) {
  // Bracket on a coarse log grid, then golden section on log(omega).
  const std::vector<double> coarse = log_spaced(1e-3, 1e3, 601);
  std::size_t best = 0;
  for (std::size_t k = 1; k < coarse.size(); ++k) {
    if (pierson_moskowitz(wave, coarse[k]) > pierson_moskowitz(wave, coarse[best])) best = k;
  }
  double lo = std::log(coarse[best == 0 ? 0 : best - 1]);
  double hi = std::log(coarse[std::min(best + 1, coarse.size() - 1)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double logw) { return pierson_moskowitz(wave, std::exp(logw)); };
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = f(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = f(a);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) out[k] = lo * std::exp(step * static_cast<double>(k));
  out.back() = hi;
  return out;
}

std::vector<double> default_frequency_grid() { return log_spaced(0.1, 3.0, 64); }

RaoTable unit_rao(std::span<const double> omegas) {
  RaoTable rao;
  rao.omegas.assign(omegas.begin(), omegas.end());
  rao.magnitudes.assign(omegas.size(), 1.0);
  return rao;
}

double interpolate_rao(const RaoTable& rao, double omega) {
  if (rao.omegas.empty() || omega < rao.omegas.front() || omega > rao.omegas.back())
    throw std::out_of_range("rao table does not cover omega=" + format_g(omega));
  const auto it = std::lower_bound(rao.omegas.begin(), rao.omegas.end(), omega);
  const auto k = static_cast<std::size_t>(it - rao.omegas.begin());
  if (rao.omegas[k] == omega) return rao.magnitudes[k];
  const double w = (omega - rao.omegas[k - 1]) / (rao.omegas[k] - rao.omegas[k - 1]);
  return (1.0 - w) * rao.magnitudes[k - 1] + w * rao.magnitudes[k];
}

SpectrumSamples external_spectrum(const SpectrumSamples& wave, const RaoTable& rao) {
  SpectrumSamples out;
  out.omegas = wave.omegas;
  out.values.reserve(wave.values.size());
  for (std::size_t k = 0; k < wave.omegas.size(); ++k) {
    const double m = interpolate_rao(rao, wave.omegas[k]);
    out.values.push_back(wave.values[k] * m * m);
  }
  return out;
}

double filter_gain_sq(const FilterParams& filt, double omega) {
  const double w2 = omega * omega;
  const double re = w2 * w2 - filt.v2 * w2 + filt.v0;
  const double im = omega * (filt.v1 - filt.v3 * w2);
  return filt.gamma * filt.gamma * w2 * w2 / (re * re + im * im);
}

FitReport fit_filter(const SpectrumSamples& target, const FilterParams& init, const FitOptions& options) {
  validate(target);
  if (target.omegas.size() < 5) throw std::invalid_argument("fit_filter: target needs at least 5 points");
  if (std::all_of(target.values.begin(), target.values.end(), [](double v) { return v == 0.0; }))
    throw DegenerateTargetError("fit_filter: degenerate target, the spectrum is identically zero");
  if (options.log_weighting &&
      std::any_of(target.values.begin(), target.values.end(), [](double v) { return !(v > 0.0); }))
    throw std::invalid_argument("fit_filter: log weighting requires a strictly positive target");
  validate(init);
  if (!is_hurwitz(init)) throw std::invalid_argument("fit_filter: initial filter is not Hurwitz");
  if (options.max_iters < 1) throw std::invalid_argument("fit_filter: max_iters must be >= 1");

  const SpectralResidual residual(target, options.log_weighting);
  ParamVec p = to_vec(init);
  Eigen::VectorXd r = residual(p);
  double cost = r.squaredNorm();

  FitReport report;
  report.cost_history.push_back(rms(r));

  const double target_scale = options.log_weighting ? 1.0 : Eigen::Map<const Eigen::VectorXd>(
                                                               target.values.data(),
                                                               static_cast<Eigen::Index>(target.values.size()))
                                                               .squaredNorm();
  double mu = 1e-3;
  constexpr double kMaxMu = 1e16;

  auto finish = [&](bool converged) {
    report.params = from_vec(p);
    report.rms_residual = rms(r);
    report.converged = converged;
    return report;
  };

  for (int iter = 0; iter < options.max_iters; ++iter) {
    if (cost <= 1e-30 * target_scale) return finish(true);

    const Eigen::MatrixXd jac = residual.jacobian(p);
    const Eigen::Matrix<double, kNumParams, kNumParams> jtj = jac.transpose() * jac;
    const ParamVec grad = jac.transpose() * r;
    if (!grad.allFinite()) break;

    bool accepted = false;
    while (mu <= kMaxMu) {
      Eigen::Matrix<double, kNumParams, kNumParams> lhs = jtj;
      for (std::size_t i = 0; i < kNumParams; ++i) lhs(i, i) += mu * std::max(jtj(i, i), 1e-12);
      const ParamVec step = lhs.ldlt().solve(-grad);
      const ParamVec candidate = p + step;
      if (step.allFinite() && feasible(candidate)) {
        const Eigen::VectorXd r_new = residual(candidate);
        const double cost_new = r_new.squaredNorm();
        if (std::isfinite(cost_new) && cost_new < cost) {
          const double reduction = cost - cost_new;
          const double step_size = step.norm();
          p = candidate;
          r = r_new;
          cost = cost_new;
          mu = std::max(mu / 3.0, 1e-12);
          accepted = true;
          ++report.iterations;
          report.cost_history.push_back(rms(r));
          if (reduction <= 1e-15 * cost || step_size <= 1e-13 * (p.norm() + 1e-13)) return finish(true);
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted) {
      // No admissible descent step at any damping level: either a stationary
      // point of the objective or a point pinned against the stability boundary.
      if (report.iterations > 0 || grad.norm() <= 1e-10 * (1.0 + std::sqrt(cost))) return finish(true);
      throw FitFailure("fit_filter: no Hurwitz-feasible descent step from the initial filter", finish(false));
    }
  }
  return finish(false);
}

FilterParams initial_filter_guess(const SpectrumSamples& target) {
  validate(target);
  if (target.values.empty()) throw std::invalid_argument("initial_filter_guess: empty target");
  const auto peak = std::max_element(target.values.begin(), target.values.end());
  if (*peak <= 0.0) throw DegenerateTargetError("initial_filter_guess: degenerate target, the spectrum is identically zero");
  const double wp = target.omegas[static_cast<std::size_t>(peak - target.values.begin())];
  constexpr double zeta = 0.35;
  // (s^2 + 2 zeta wp s + wp^2)^2
  const double b = 2.0 * zeta * wp, c = wp * wp;
  FilterParams f{c * c, 2.0 * b * c, 2.0 * c + b * b, 2.0 * b, 1.0};
  f.gamma = std::sqrt(*peak / filter_gain_sq(f, wp));
  return f;
}

double relative_rms_error(const FilterParams& filt, const SpectrumSamples& target, double lo, double hi) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < target.omegas.size(); ++k) {
    const double w = target.omegas[k];
    if (w < lo || w > hi) continue;
    const double d = filter_gain_sq(filt, w) - target.values[k];
    num += d * d;
    den += target.values[k] * target.values[k];
  }
  if (den <= 0.0) throw DegenerateTargetError("relative_rms_error: target vanishes on the band");
  return std::sqrt(num / den);
}

}  // namespace shiproll
