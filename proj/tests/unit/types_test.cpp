#include <gtest/gtest.h>

#include <vector>

#include "ftl/random.hpp"
#include "ftl/types.hpp"

namespace {

using ftl::FiniteJointDistribution;
using ftl::FiniteMarginal;

TEST(FiniteMarginal, Validates) {
  EXPECT_NO_THROW(FiniteMarginal({{0.0, 0.5}, {1.0, 0.5}}));
  EXPECT_THROW(FiniteMarginal({}), std::invalid_argument);
  EXPECT_THROW(FiniteMarginal({{0.0, 0.5}, {1.0, 0.4}}), std::invalid_argument);
  EXPECT_THROW(FiniteMarginal({{0.0, 1.0}, {1.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(FiniteMarginal({{0.3, 0.5}, {0.3, 0.5}}), std::invalid_argument);
  EXPECT_THROW(FiniteMarginal({{1.2, 1.0}}), std::invalid_argument);
}

TEST(FiniteMarginal, WeightToleranceIsOneEMinusTwelve) {
  EXPECT_NO_THROW(FiniteMarginal({{0.0, 0.5}, {1.0, 0.5 + 5e-13}}));
  EXPECT_THROW(FiniteMarginal({{0.0, 0.5}, {1.0, 0.5 + 1e-11}}), std::invalid_argument);
}

TEST(FiniteMarginal, CdfAndSurvivalAreWeak) {
  const FiniteMarginal m({{0.25, 0.5}, {0.75, 0.5}});
  EXPECT_EQ(m.cdf(0.0), 0.0);
  EXPECT_EQ(m.cdf(0.25), 0.5);
  EXPECT_EQ(m.cdf(1.0), 1.0);
  EXPECT_EQ(m.survival(0.75), 0.5);
  EXPECT_EQ(m.survival(0.25), 1.0);
  EXPECT_EQ(m.survival(0.8), 0.0);
}

TEST(FiniteJointDistribution, Validates) {
  EXPECT_THROW(FiniteJointDistribution({}), std::invalid_argument);
  EXPECT_THROW(FiniteJointDistribution({{{0.1, 0.2}, 0.5}, {{0.1, 0.2}, 0.5}}),
               std::invalid_argument);
  EXPECT_THROW(FiniteJointDistribution({{{0.1, -0.2}, 1.0}}), std::invalid_argument);
  EXPECT_NO_THROW(FiniteJointDistribution({{{0.8, 0.2}, 1.0}}));
}

TEST(FiniteJointDistribution, EmpiricalMergesDuplicates) {
  const std::vector<ftl::ValuationPair> samples{{0.1, 0.9}, {0.2, 0.3}, {0.1, 0.9}, {0.1, 0.9}};
  const auto dist = FiniteJointDistribution::empirical(samples);
  ASSERT_EQ(dist.size(), 2u);
  EXPECT_EQ(dist.atoms()[0].pair, (ftl::ValuationPair{0.1, 0.9}));
  EXPECT_DOUBLE_EQ(dist.atoms()[0].weight, 0.75);
  EXPECT_DOUBLE_EQ(dist.atoms()[1].weight, 0.25);
}

TEST(BreakpointSet, SortsDeduplicatesAndKeepsEndpoints) {
  const ftl::BreakpointSet set({0.5, 0.25, 0.5, 0.75});
  const std::vector<double> expected{0.0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_EQ(std::vector<double>(set.points().begin(), set.points().end()), expected);
  EXPECT_TRUE(set.contains(0.25));
  EXPECT_FALSE(set.contains(0.3));
}

TEST(Random, MixSeedSeparatesIndices) {
  EXPECT_NE(ftl::mix_seed(0, 0), ftl::mix_seed(0, 1));
  EXPECT_NE(ftl::mix_seed(0, 0), ftl::mix_seed(1, 0));
  EXPECT_EQ(ftl::mix_seed(42, 7), ftl::mix_seed(42, 7));
}

TEST(Random, UniformInUnitInterval) {
  ftl::Rng rng(9);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 5e-3);
}

TEST(Random, StreamIsReproducible) {
  ftl::Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

}  // namespace
