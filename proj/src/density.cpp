#include "shiproll/density.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "shiproll/errors.hpp"

namespace shiproll {

namespace {

std::optional<std::size_t> bin_of(const Axis& axis, double x) {
  if (!(x >= axis.min && x <= axis.max)) return std::nullopt;
  const auto k = static_cast<std::size_t>((x - axis.min) / (axis.max - axis.min) * static_cast<double>(axis.n_bins));
  return std::min(k, axis.n_bins - 1);
}

void require_same_axes(const DensityGrid& a, const DensityGrid& b) {
  if (a.axes != b.axes || a.values.size() != b.values.size())
    throw GridMismatchError("density grids have different axes");
}

std::size_t record_index(const Ensemble& e, double t) {
  const double spacing = e.config.dt * static_cast<double>(e.config.record_stride);
  const double k = std::round(t / spacing);
  if (t < 0.0 || std::abs(k * spacing - t) > 1e-9 * std::max(1.0, std::abs(t)) ||
      static_cast<std::size_t>(k) > step_count(e.config) / e.config.record_stride)
    throw std::invalid_argument("time " + format_g(t) + " is not on the ensemble record grid");
  return static_cast<std::size_t>(k);
}

}  // namespace

double DensityGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.width();
  return v;
}

double DensityGrid::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * cell_volume();
}

void validate(const Axis& axis) {
  if (!(std::isfinite(axis.min) && std::isfinite(axis.max) && axis.max > axis.min))
    throw std::invalid_argument("axis range must be finite with max > min");
  if (axis.n_bins < 1) throw std::invalid_argument("axis needs at least one bin");
}

void validate(const DensityGrid& grid) {
  if (grid.dims() != 1 && grid.dims() != 2) throw std::invalid_argument("density grid must have 1 or 2 axes");
  std::size_t cells = 1;
  for (const auto& a : grid.axes) {
    validate(a);
    cells *= a.n_bins;
  }
  if (grid.values.size() != cells) throw std::invalid_argument("density grid value count does not match its axes");
  for (double v : grid.values) {
    if (!(std::isfinite(v) && v >= 0.0)) throw std::invalid_argument("density values must be finite and >= 0");
  }
}

DensityGrid normalized(DensityGrid grid) {
  const double m = grid.mass();
  if (!(m > 0.0)) throw std::invalid_argument("cannot normalize a density with zero mass");
  for (double& v : grid.values) v /= m;
  return grid;
}

DensityGrid histogram_density(std::span<const double> samples, const Axis& axis) {
  validate(axis);
  if (samples.empty()) throw EmptyPopulationError("histogram_density: no samples");
  DensityGrid g;
  g.axes = {axis};
  g.values.assign(axis.n_bins, 0.0);
  g.n_samples = samples.size();
  std::size_t outside = 0;
  for (double x : samples) {
    if (const auto k = bin_of(axis, x)) {
      g.values[*k] += 1.0;
    } else {
      ++outside;
    }
  }
  const double n = static_cast<double>(samples.size());
  const double scale = 1.0 / (n * g.cell_volume());
  for (double& v : g.values) v *= scale;
  g.out_of_range_fraction = static_cast<double>(outside) / n;
  return g;
}

DensityGrid histogram_density(std::span<const std::array<double, 2>> samples, const Axis& a0, const Axis& a1) {
  validate(a0);
  validate(a1);
  if (samples.empty()) throw EmptyPopulationError("histogram_density: no samples");
  DensityGrid g;
  g.axes = {a0, a1};
  g.values.assign(a0.n_bins * a1.n_bins, 0.0);
  g.n_samples = samples.size();
  std::size_t outside = 0;
  for (const auto& p : samples) {
    const auto i = bin_of(a0, p[0]);
    const auto j = bin_of(a1, p[1]);
    if (i && j) {
      g.at(*i, *j) += 1.0;
    } else {
      ++outside;
    }
  }
  const double n = static_cast<double>(samples.size());
  const double scale = 1.0 / (n * g.cell_volume());
  for (double& v : g.values) v *= scale;
  g.out_of_range_fraction = static_cast<double>(outside) / n;
  return g;
}

std::vector<State6> surviving_states(const Ensemble& e, double t) {
  const std::size_t k = record_index(e, t);
  std::vector<State6> out;
  out.reserve(e.trajectories.size());
  for (const auto& tr : e.trajectories) {
    if (tr.capsize_time && *tr.capsize_time <= t) continue;
    out.push_back(tr.states.at(k));
  }
  return out;
}

EnsembleDensity histogram_density(const Ensemble& e, double t, std::span<const std::size_t> dims,
                                  std::span<const Axis> axes) {
  if (dims.empty() || dims.size() > 2 || dims.size() != axes.size())
    throw std::invalid_argument("histogram_density: select one or two axes, each with a grid");
  for (std::size_t d : dims) {
    if (d >= 6) throw std::invalid_argument("histogram_density: state component out of range");
  }
  const std::vector<State6> states = surviving_states(e, t);
  if (states.empty()) throw EmptyPopulationError("histogram_density: no surviving paths at t=" + format_g(t));

  EnsembleDensity out;
  out.n_surviving = states.size();
  out.surviving_fraction = static_cast<double>(states.size()) / static_cast<double>(e.trajectories.size());
  if (dims.size() == 1) {
    std::vector<double> xs;
    xs.reserve(states.size());
    for (const auto& s : states) xs.push_back(s[dims[0]]);
    out.grid = histogram_density(xs, axes[0]);
  } else {
    std::vector<std::array<double, 2>> xs;
    xs.reserve(states.size());
    for (const auto& s : states) xs.push_back({s[dims[0]], s[dims[1]]});
    out.grid = histogram_density(xs, axes[0], axes[1]);
  }
  return out;
}

std::vector<Axis> default_axes(const Ensemble& e, double t, std::span<const std::size_t> dims, double phi_v,
                               std::size_t n_bins) {
  const std::vector<State6> states = surviving_states(e, t);
  if (states.empty()) throw EmptyPopulationError("default_axes: no surviving paths at t=" + format_g(t));
  std::vector<Axis> axes;
  for (std::size_t d : dims) {
    if (d == kRoll) {
      axes.push_back({-phi_v, phi_v, n_bins});
      continue;
    }
    double mean = 0.0;
    for (const auto& s : states) mean += s[d];
    mean /= static_cast<double>(states.size());
    double var = 0.0;
    for (const auto& s : states) var += (s[d] - mean) * (s[d] - mean);
    const double sd = states.size() > 1 ? std::sqrt(var / static_cast<double>(states.size() - 1)) : 0.0;
    const double half = sd > 0.0 ? 3.0 * sd : 1.0;
    axes.push_back({-half, half, n_bins});
  }
  return axes;
}

double l2_distance(const DensityGrid& a, const DensityGrid& b) {
  require_same_axes(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double d = a.values[k] - b.values[k];
    sum += d * d;
  }
  return std::sqrt(sum * a.cell_volume());
}

double l1_distance(const DensityGrid& a, const DensityGrid& b) {
  require_same_axes(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) sum += std::abs(a.values[k] - b.values[k]);
  return sum * a.cell_volume();
}

DensityGrid coarsen(const DensityGrid& grid, std::size_t factor) {
  validate(grid);
  if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
  DensityGrid out;
  out.out_of_range_fraction = grid.out_of_range_fraction;
  out.n_samples = grid.n_samples;
  for (const auto& a : grid.axes) {
    if (a.n_bins % factor != 0) throw std::invalid_argument("coarsen: bin count not divisible by factor");
    out.axes.push_back({a.min, a.max, a.n_bins / factor});
  }
  std::size_t cells = 1;
  for (const auto& a : out.axes) cells *= a.n_bins;
  out.values.assign(cells, 0.0);
  const double f = static_cast<double>(factor);
  if (grid.dims() == 1) {
    for (std::size_t i = 0; i < grid.axes[0].n_bins; ++i) out.at(i / factor) += grid.at(i) / f;
  } else {
    for (std::size_t i = 0; i < grid.axes[0].n_bins; ++i)
      for (std::size_t j = 0; j < grid.axes[1].n_bins; ++j) out.at(i / factor, j / factor) += grid.at(i, j) / (f * f);
  }
  return out;
}

}  // namespace shiproll
