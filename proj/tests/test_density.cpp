#include <gtest/gtest.h>

#include <cmath>

#include "shiproll/density.hpp"
#include "shiproll/errors.hpp"
#include "support.hpp"

using namespace shiproll;
using shiproll::test::Gen;

namespace {

DensityGrid grid_1d(std::vector<double> values, double min, double max) {
  DensityGrid g;
  g.axes = {Axis{min, max, values.size()}};
  g.values = std::move(values);
  return g;
}

DensityGrid random_grid(Gen& g, std::size_t n0, std::size_t n1) {
  DensityGrid d;
  d.axes = {Axis{-1.0, 1.0, n0}, Axis{0.0, 3.0, n1}};
  for (std::size_t k = 0; k < n0 * n1; ++k) d.values.push_back(g.uniform(0.0, 2.0));
  return d;
}

// Three record times 0, 1, 2; path p carries roll p at every record.
Ensemble ladder(std::vector<std::optional<double>> capsizes) {
  Ensemble e;
  e.config.dt = 1.0;
  e.config.t_end = 2.0;
  e.config.n_paths = capsizes.size();
  for (std::size_t p = 0; p < capsizes.size(); ++p) {
    Trajectory tr;
    tr.capsize_time = capsizes[p];
    for (double t : {0.0, 1.0, 2.0}) {
      if (tr.capsize_time && t > *tr.capsize_time) break;
      State6 s;
      s[kRoll] = static_cast<double>(p) + 0.5;
      s[kRollRate] = -static_cast<double>(p);
      tr.times.push_back(t);
      tr.states.push_back(s);
    }
    e.trajectories.push_back(tr);
  }
  return e;
}

}  // namespace

TEST(Histogram, PointMassFillsOneCell) {
  const std::vector<double> xs(100, 0.33);
  const Axis axis{0.0, 1.0, 10};
  const DensityGrid d = histogram_density(xs, axis);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(d.values[k], k == 3 ? 1.0 / axis.width() : 0.0);
  EXPECT_NEAR(d.mass(), 1.0, 1e-12);
}

TEST(Histogram, UniformSamplesWithinBinomialError) {
  Gen g(30);
  const std::size_t n = 20000;
  std::vector<double> xs;
  for (std::size_t k = 0; k < n; ++k) xs.push_back(g.uniform(-2.0, 3.0));
  const Axis axis{-2.0, 3.0, 10};
  const DensityGrid d = histogram_density(xs, axis);
  const double p = 0.1;
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(n)) / axis.width();
  for (double v : d.values) EXPECT_NEAR(v, 1.0 / 5.0, 4.0 * se);
}

TEST(Histogram, TwoSamplesTwoBins) {
  const std::vector<double> xs{0.25, 0.75};
  const DensityGrid d = histogram_density(xs, Axis{0.0, 1.0, 2});
  EXPECT_DOUBLE_EQ(d.values[0] * d.axes[0].width(), 0.5);
  EXPECT_DOUBLE_EQ(d.values[1] * d.axes[0].width(), 0.5);
}

TEST(Histogram, OutOfRangeFractionCompletesMass) {
  Gen g(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::array<double, 2>> xs;
    const std::size_t n = 500 + g.index(500);
    for (std::size_t k = 0; k < n; ++k) xs.push_back({g.normal(), g.normal() * 2.0});
    const Axis a0{-g.uniform(0.5, 3), g.uniform(0.5, 3), 1 + g.index(40)};
    const Axis a1{-g.uniform(0.5, 5), g.uniform(0.5, 5), 1 + g.index(40)};
    const DensityGrid d = histogram_density(xs, a0, a1);
    EXPECT_NEAR(d.mass() + d.out_of_range_fraction, 1.0, 1e-12);
    EXPECT_NO_THROW(validate(d));
  }
}

TEST(Histogram, RejectsEmptySamples) {
  const std::vector<double> none;
  EXPECT_THROW(histogram_density(none, Axis{}), EmptyPopulationError);
}

TEST(L2Distance, IdentityAndSymmetry) {
  Gen g(32);
  const DensityGrid a = random_grid(g, 7, 5), b = random_grid(g, 7, 5);
  EXPECT_EQ(l2_distance(a, a), 0.0);
  EXPECT_EQ(l2_distance(a, b), l2_distance(b, a));
}

TEST(L2Distance, TwoCellExample) {
  EXPECT_DOUBLE_EQ(l2_distance(grid_1d({1, 0}, 0, 2), grid_1d({0, 1}, 0, 2)), std::sqrt(2.0));
}

TEST(L2Distance, TriangleInequality) {
  Gen g(33);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n0 = 1 + g.index(10), n1 = 1 + g.index(10);
    const DensityGrid a = random_grid(g, n0, n1), b = random_grid(g, n0, n1), c = random_grid(g, n0, n1);
    EXPECT_LE(l2_distance(a, c), l2_distance(a, b) + l2_distance(b, c) + 1e-12);
  }
}

TEST(L2Distance, MismatchedGridsAreRejected) {
  EXPECT_THROW(l2_distance(grid_1d({1, 0}, 0, 2), grid_1d({1, 0}, 0, 3)), GridMismatchError);
  EXPECT_THROW(l2_distance(grid_1d({1, 0}, 0, 2), grid_1d({1, 0, 0}, 0, 2)), GridMismatchError);
  EXPECT_THROW(l1_distance(grid_1d({1, 0}, 0, 2), grid_1d({1, 0}, 1, 2)), GridMismatchError);
}

TEST(L1Distance, HandArithmetic) {
  EXPECT_DOUBLE_EQ(l1_distance(grid_1d({1, 0}, 0, 2), grid_1d({0.5, 0.5}, 0, 2)), 1.0);
}

TEST(L2Distance, DoublingSamplesShrinksByRootTwo) {
  Gen g(34);
  const Axis a0{-4, 4, 16}, a1{-4, 4, 16};
  auto sample = [&](std::size_t n) {
    std::vector<std::array<double, 2>> xs(n);
    for (auto& x : xs) x = {g.normal(), g.normal()};
    return histogram_density(xs, a0, a1);
  };
  double small = 0.0, large = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    small += l2_distance(sample(4000), sample(4000));
    large += l2_distance(sample(8000), sample(8000));
  }
  EXPECT_NEAR(large / small, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(Normalized, ProducesUnitMass) {
  Gen g(35);
  const DensityGrid d = normalized(random_grid(g, 9, 4));
  EXPECT_NEAR(d.mass(), 1.0, 1e-12);
  EXPECT_THROW(normalized(grid_1d({0, 0}, 0, 1)), std::invalid_argument);
}

TEST(Coarsen, PreservesMassAndAxes) {
  Gen g(36);
  const DensityGrid d = random_grid(g, 12, 8);
  const DensityGrid c = coarsen(d, 4);
  EXPECT_EQ(c.axes[0].n_bins, 3u);
  EXPECT_EQ(c.axes[1].n_bins, 2u);
  EXPECT_EQ(c.axes[0].min, d.axes[0].min);
  EXPECT_NEAR(c.mass(), d.mass(), 1e-12);
  double block = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) block += d.at(i, j);
  EXPECT_NEAR(c.at(0, 0), block / 16.0, 1e-12);
  EXPECT_THROW(coarsen(d, 5), std::invalid_argument);
}

TEST(EnsembleHistogram, ExcludesCapsizedPaths) {
  const Ensemble e = ladder({std::nullopt, 1.0, std::nullopt, 2.0});
  const std::vector<std::size_t> dims{kRoll};
  const std::vector<Axis> axes{Axis{0.0, 4.0, 4}};
  const EnsembleDensity at0 = histogram_density(e, 0.0, dims, axes);
  EXPECT_EQ(at0.n_surviving, 4u);
  EXPECT_DOUBLE_EQ(at0.surviving_fraction, 1.0);
  const EnsembleDensity at1 = histogram_density(e, 1.0, dims, axes);
  EXPECT_EQ(at1.n_surviving, 3u);
  EXPECT_DOUBLE_EQ(at1.surviving_fraction, 0.75);
  EXPECT_DOUBLE_EQ(at1.grid.values[1], 0.0);
  EXPECT_NEAR(at1.grid.values[0], 1.0 / 3.0, 1e-15);
  const EnsembleDensity at2 = histogram_density(e, 2.0, dims, axes);
  EXPECT_EQ(at2.n_surviving, 2u);
  EXPECT_NEAR(at2.grid.mass(), 1.0, 1e-12);
}

TEST(EnsembleHistogram, TwoAxesAndOutOfRange) {
  const Ensemble e = ladder({std::nullopt, std::nullopt, std::nullopt});
  const std::vector<std::size_t> dims{kRoll, kRollRate};
  const std::vector<Axis> axes{Axis{0.0, 2.0, 2}, Axis{-1.5, 0.5, 2}};
  const EnsembleDensity d = histogram_density(e, 2.0, dims, axes);
  EXPECT_NEAR(d.grid.out_of_range_fraction, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.grid.mass(), 2.0 / 3.0, 1e-15);
}

TEST(EnsembleHistogram, Errors) {
  const Ensemble gone = ladder({0.0, 1.0});
  const std::vector<std::size_t> dims{kRoll};
  const std::vector<Axis> axes{Axis{0.0, 4.0, 4}};
  EXPECT_THROW(histogram_density(gone, 1.0, dims, axes), EmptyPopulationError);
  const Ensemble e = ladder({std::nullopt});
  EXPECT_THROW(histogram_density(e, 0.5, dims, axes), std::invalid_argument);
  EXPECT_THROW(histogram_density(e, 3.0, dims, axes), std::invalid_argument);
  const std::vector<std::size_t> bad{7};
  EXPECT_THROW(histogram_density(e, 0.0, bad, axes), std::invalid_argument);
}

TEST(DefaultAxes, RollSpansCapsizeRangeOthersSpanThreeSd) {
  const Ensemble e = ladder({std::nullopt, std::nullopt, std::nullopt});
  const std::vector<std::size_t> dims{kRoll, kRollRate, kExcitation};
  const auto axes = default_axes(e, 1.0, dims, 0.8, 32);
  EXPECT_EQ(axes[0], (Axis{-0.8, 0.8, 32}));
  // Roll rates 0, -1, -2 have sample sd 1.
  EXPECT_NEAR(axes[1].max, 3.0, 1e-12);
  EXPECT_NEAR(axes[1].min, -3.0, 1e-12);
  EXPECT_EQ(axes[2], (Axis{-1.0, 1.0, 32}));
}
