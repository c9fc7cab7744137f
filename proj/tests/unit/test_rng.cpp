#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "statrcm/rng.hpp"

namespace {

using namespace statrcm::rng;

TEST(Rng, StreamIsAFunctionOfItsKey) {
  CounterRng a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, DerivedKeysDifferPerCounter) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b)
      for (std::uint64_t c = 0; c < 5; ++c) keys.insert(derive_key(7, a, b, c));
  EXPECT_EQ(keys.size(), 2000u);
  EXPECT_NE(derive_key(7, 1), derive_key(8, 1));
}

TEST(Rng, UniformOpenInterval) {
  CounterRng g(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  CounterRng g(11);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(Rng, NormalVectorMatchesScalarDraws) {
  CounterRng a(99), b(99);
  const Eigen::VectorXd v = a.normal_vector(7);
  for (Eigen::Index i = 0; i < 7; ++i) EXPECT_EQ(v[i], b.normal());
}

}  // namespace
