#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shiproll/parallel.hpp"
#include "shiproll/rng.hpp"

using namespace shiproll;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalStream, SameAddressSameDraws) {
  NormalStream a(42, 7), b(42, 7);
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(a.next(), b.next());
}

TEST(NormalStream, DifferentStreamsDiffer) {
  NormalStream a(42, 7), b(42, 8), c(43, 7);
  int same_b = 0, same_c = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = a.next();
    same_b += x == b.next();
    same_c += x == c.next();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(NormalStream, MomentsOfStandardNormal) {
  NormalStream s(2024, 0);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int k = 0; k < n; ++k) {
    const double x = s.next();
    ASSERT_TRUE(std::isfinite(x));
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(NormalStream, UniformsInHalfOpenUnitInterval) {
  NormalStream s(5, 5);
  double mean = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double u = s.next_uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (unsigned threads : {1u, 4u}) {
    try {
      parallel_for(100, threads, [](std::size_t i) {
        if (i == 37 || i == 80) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "37");
    }
  }
}

TEST(ParallelFor, ResultsIndependentOfThreadCount) {
  auto run = [](unsigned threads) {
    std::vector<double> out(257);
    parallel_for(out.size(), threads, [&](std::size_t i) {
      NormalStream s(9, i);
      double acc = 0.0;
      for (int k = 0; k < 100; ++k) acc += s.next();
      out[i] = acc;
    });
    return out;
  };
  const auto serial = run(1);
  EXPECT_EQ(serial, run(3));
  EXPECT_EQ(serial, run(8));
}
