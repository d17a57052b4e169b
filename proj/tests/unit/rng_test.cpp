#include <gtest/gtest.h>

#include <vector>

#include "ictal/rng.hpp"

namespace ictal {
namespace {

std::vector<double> draws(RngStream rng, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(rng.uniform());
  return out;
}

TEST(Rng, SameSeedSameSequence) {
  EXPECT_EQ(draws(RngStream(42), 1000), draws(RngStream(42), 1000));
}

TEST(Rng, DifferentSeedsDiffer) {
  EXPECT_NE(draws(RngStream(42), 1000), draws(RngStream(43), 1000));
}

TEST(Rng, ChildDiffersFromParent) {
  const RngStream parent(42);
  EXPECT_NE(draws(parent.split("dropout"), 1000), draws(parent, 1000));
  EXPECT_NE(draws(parent.split("dropout"), 1000), draws(parent.split("shuffle"), 1000));
}

TEST(Rng, ChildIndependentOfParentDraws) {
  RngStream a(7);
  RngStream b(7);
  for (int i = 0; i < 100; ++i) b();
  EXPECT_EQ(draws(a.split("init"), 50), draws(b.split("init"), 50));
  EXPECT_EQ(draws(a.split(3), 50), draws(b.split(3), 50));
}

TEST(Rng, UniformInUnitInterval) {
  RngStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowStaysInRangeAndCountsDraws) {
  RngStream rng(2);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(rng.below(7), 7u);
  EXPECT_GE(rng.draws(), 1000u);
  EXPECT_EQ(rng.seed(), 2u);
}

TEST(Rng, AlgorithmIdRecorded) {
  EXPECT_FALSE(RngStream::algorithm_id.empty());
}

}  // namespace
}  // namespace ictal
