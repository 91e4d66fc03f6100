#pragma once

// Histogram density estimates over one or two state components and discrete
// L1 / L2 distances between densities on identical grids.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "shiproll/sde.hpp"

namespace shiproll {

struct Axis {
  double min = 0.0;
  double max = 1.0;
  std::size_t n_bins = 64;

  double width() const { return (max - min) / static_cast<double>(n_bins); }
  double center(std::size_t k) const { return min + (static_cast<double>(k) + 0.5) * width(); }

  friend bool operator==(const Axis&, const Axis&) = default;
};

struct DensityGrid {
  std::vector<Axis> axes;     ///< one or two axes
  std::vector<double> values; ///< row-major, last axis varies fastest
  double out_of_range_fraction = 0.0;
  std::size_t n_samples = 0;

  std::size_t dims() const { return axes.size(); }
  double cell_volume() const;
  /// sum(values) * cell_volume
  double mass() const;
  double& at(std::size_t i, std::size_t j = 0) { return values[i * (dims() == 2 ? axes[1].n_bins : 1) + j]; }
  double at(std::size_t i, std::size_t j = 0) const { return values[i * (dims() == 2 ? axes[1].n_bins : 1) + j]; }
};

void validate(const Axis& axis);
void validate(const DensityGrid& grid);

/// Copy rescaled to unit mass.
DensityGrid normalized(DensityGrid grid);

/// Density = count / (N * cell volume); samples outside the axes are counted
/// in out_of_range_fraction, so mass() + out_of_range_fraction == 1.
DensityGrid histogram_density(std::span<const double> samples, const Axis& axis);
DensityGrid histogram_density(std::span<const std::array<double, 2>> samples, const Axis& a0, const Axis& a1);

struct EnsembleDensity {
  DensityGrid grid;
  std::size_t n_surviving = 0;
  double surviving_fraction = 0.0;
};

/// Histogram of the selected state components over the paths that have not
/// capsized by time t. t must lie on the ensemble's record grid.
EnsembleDensity histogram_density(const Ensemble& e, double t, std::span<const std::size_t> dims,
                                  std::span<const Axis> axes);

/// Roll angle on [-phi_v, phi_v]; any other component on +-3 sample standard
/// deviations about zero (+-1 when the spread is zero), over the survivors at t.
std::vector<Axis> default_axes(const Ensemble& e, double t, std::span<const std::size_t> dims, double phi_v,
                               std::size_t n_bins = 64);

/// States of the surviving paths at record time t.
std::vector<State6> surviving_states(const Ensemble& e, double t);

/// sqrt(sum (a - b)^2 * cell volume). Throws GridMismatchError unless the axes match.
double l2_distance(const DensityGrid& a, const DensityGrid& b);
/// sum |a - b| * cell volume.
double l1_distance(const DensityGrid& a, const DensityGrid& b);

/// Merges blocks of factor^dims cells, preserving mass. n_bins must divide by factor.
DensityGrid coarsen(const DensityGrid& grid, std::size_t factor);

}  // namespace shiproll
