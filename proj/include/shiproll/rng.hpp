#pragma once

// Counter-based random streams. Each (seed, stream) pair addresses an
// independent sequence, so per-path draws never depend on scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace shiproll {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Standard-normal stream addressed by (seed, stream id). Each Philox block
/// yields two doubles, turned into two normals by Box-Muller.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto out = Philox4x32::generate(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
        key_);
    ++block_;
    const double u1 = to_unit_open(out[0], out[1]);
    const double u2 = to_unit_open(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform in (0, 1]; consumes a whole block.
  double next_uniform() {
    const auto out = Philox4x32::generate(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
        key_);
    ++block_;
    return to_unit_open(out[0], out[1]);
  }

 private:
  static double to_unit_open(std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace shiproll
