#pragma once

// Hand-rolled generators and independent oracles shared by the unit tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "shiproll/model.hpp"

namespace shiproll::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return uniform(0.0, 1.0) < 0.5; }

  ShipParams ship() {
    ShipParams s;
    s.lambda1 = uniform(0.0, 0.5);
    s.damping_form = coin() ? DampingForm::QuadraticAbs : DampingForm::Cubic;
    s.lambda2 = uniform(0.0, 0.5);
    s.lambda3 = uniform(0.0, 0.5);
    s.c1 = uniform(0.2, 2.0);
    s.c3 = uniform(-2.0, 0.5);
    s.c5 = uniform(-0.5, 0.5);
    s.phi_v = uniform(0.3, 2.0);
    return s;
  }

  /// Stable filter built from two random left-half-plane pole pairs.
  FilterParams stable_filter() {
    const double w1 = uniform(0.3, 2.0), z1 = uniform(0.05, 0.9);
    const double w2 = uniform(0.3, 2.0), z2 = uniform(0.05, 0.9);
    const double a1 = 2.0 * z1 * w1, b1 = w1 * w1, a2 = 2.0 * z2 * w2, b2 = w2 * w2;
    FilterParams f;
    f.v3 = a1 + a2;
    f.v2 = b1 + b2 + a1 * a2;
    f.v1 = a1 * b2 + a2 * b1;
    f.v0 = b1 * b2;
    f.gamma = uniform(0.1, 1.0);
    return f;
  }

  State6 state(double scale) {
    State6 s;
    for (double& v : s.x) v = uniform(-scale, scale);
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

/// Hurwitz test by companion-matrix eigenvalues.
inline bool hurwitz_by_eigenvalues(const FilterParams& f) {
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(0, 0) = -f.v3;
  companion(0, 1) = -f.v2;
  companion(0, 2) = -f.v1;
  companion(0, 3) = -f.v0;
  companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;
  const Eigen::Vector4cd roots = companion.eigenvalues();
  for (int k = 0; k < 4; ++k)
    if (!(roots[k].real() < 0.0)) return false;
  return true;
}

/// |gamma s^2 / a(s)|^2 at s = i omega, evaluated in complex arithmetic.
inline double gain_sq_complex(const FilterParams& f, double omega) {
  const std::complex<double> s(0.0, omega);
  const std::complex<double> a = s * s * s * s + f.v3 * s * s * s + f.v2 * s * s + f.v1 * s + f.v0;
  return std::norm(f.gamma * s * s / a);
}

/// Central-difference divergence of the drift.
inline double divergence_fd(const ShipParams& ship, const FilterParams& filt, State6 s, double h = 1e-6) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    State6 up = s, dn = s;
    up[i] += h;
    dn[i] -= h;
    sum += (drift(ship, filt, up)[i] - drift(ship, filt, dn)[i]) / (2.0 * h);
  }
  return sum;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("shiproll_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace shiproll::test
