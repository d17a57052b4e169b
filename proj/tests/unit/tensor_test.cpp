#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ictal/init.hpp"
#include "ictal/tensor.hpp"
#include "oracles.hpp"

namespace ictal {
namespace {

TEST(Tensor, ShapeAndSizeAgree) {
  Tensor<float> t(Shape{2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_EQ(t.dim(1), 3u);
  for (float v : t.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Tensor, RejectsZeroExtentAndSizeMismatch) {
  EXPECT_THROW(Tensor<float>(Shape{2, 0}), Error);
  EXPECT_THROW(Tensor<float>(Shape{2, 2}, std::vector<float>{1, 2, 3}), Error);
}

TEST(Tensor, RowMajorFirstAxisSlowest) {
  std::vector<double> v(24);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const Tensor<double> t(Shape{2, 3, 4}, v);
  EXPECT_EQ(t.at({0, 0, 1}), 1.0);
  EXPECT_EQ(t.at({0, 1, 0}), 4.0);
  EXPECT_EQ(t.at({1, 0, 0}), 12.0);
  EXPECT_EQ(t.at({1, 2, 3}), 23.0);
  EXPECT_EQ(row_major_strides(Shape{2, 3, 4}), (std::vector<std::size_t>{12, 4, 1}));
}

TEST(Tensor, ReshapeNeverReorders) {
  std::mt19937_64 gen(1);
  const auto t = testing::random_tensor(Shape{4, 6}, gen);
  const auto r = t.reshaped(Shape{2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(r[i], t[i]);
  EXPECT_THROW(t.reshaped(Shape{5, 5}), Error);
}

TEST(Tensor, ReshapeRoundTripProperty) {
  std::mt19937_64 gen(7);
  const std::vector<Shape> factorizations{{24}, {2, 12}, {3, 8}, {2, 3, 4}, {4, 3, 2}, {1, 24, 1}};
  for (int trial = 0; trial < 50; ++trial) {
    const Shape& s1 = factorizations[gen() % factorizations.size()];
    const Shape& s2 = factorizations[gen() % factorizations.size()];
    const auto t = testing::random_tensor(s1, gen);
    EXPECT_EQ(t.reshaped(s2).reshaped(s1), t);
  }
}

TEST(Tensor, ElementwiseArithmeticMatchesScalarLoop) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Shape shape{1 + gen() % 4, 1 + gen() % 5};
    const auto a = testing::random_tensor(shape, gen);
    const auto b = testing::random_tensor(shape, gen);
    auto sum = a, diff = a, prod = a, scaled = a;
    sum += b;
    diff -= b;
    prod *= b;
    scaled *= 2.5;
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(sum[i], a[i] + b[i]);
      EXPECT_EQ(diff[i], a[i] - b[i]);
      EXPECT_EQ(prod[i], a[i] * b[i]);
      EXPECT_EQ(scaled[i], a[i] * 2.5);
    }
    EXPECT_EQ(sum.shape(), shape);
  }
  Tensor<double> a(Shape{2, 2}), b(Shape{4});
  EXPECT_THROW(a += b, Error);
}

TEST(Tensor, CastPreservesShape) {
  Tensor<float> f(Shape{3}, std::vector<float>{1.5f, -2.0f, 0.25f});
  const auto d = f.cast<double>();
  EXPECT_EQ(d.shape(), f.shape());
  EXPECT_EQ(d[0], 1.5);
  EXPECT_EQ(d[2], 0.25);
}

TEST(Glorot, UnitFansBoundedBySqrt3) {
  RngStream rng(5);
  const auto w = glorot_uniform<float>(Shape{1000}, 1, 1, rng);
  const double limit = std::sqrt(3.0);
  for (float v : w.values()) {
    EXPECT_LE(std::abs(v), limit);
  }
}

TEST(Glorot, WideLayerBound) {
  // Independent evaluation of sqrt(6 / 2112).
  const double expected = 0.05330017908890261;
  EXPECT_NEAR(glorot_limit(2048, 64), expected, 1e-12);
  RngStream rng(9);
  const auto w = glorot_uniform<float>(Shape{64, 2048}, 2048, 64, rng);
  for (float v : w.values()) EXPECT_LE(std::abs(v), expected);
}

TEST(Glorot, MonteCarloMeanNearZero) {
  RngStream rng(123);
  const auto w = glorot_uniform<double>(Shape{100000}, 3, 3, rng);
  double mean = 0.0;
  for (double v : w.values()) mean += v;
  mean /= 100000.0;
  EXPECT_NEAR(mean, 0.0, 0.02);
}

TEST(Glorot, RejectsZeroFan) {
  RngStream rng(1);
  EXPECT_THROW(glorot_uniform<float>(Shape{2}, 0, 1, rng), Error);
  EXPECT_THROW(glorot_uniform<float>(Shape{2}, 1, 0, rng), Error);
}

}  // namespace
}  // namespace ictal
