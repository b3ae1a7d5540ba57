#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ftl/random.hpp"
#include "ftl/reward.hpp"
#include "ftl/types.hpp"

namespace {

using ftl::FiniteJointDistribution;
using ftl::JointAtom;
using ftl::ValuationPair;

FiniteJointDistribution uniform_over(std::vector<ValuationPair> pairs) {
  std::vector<JointAtom> atoms;
  for (const auto& v : pairs) atoms.push_back({v, 1.0 / static_cast<double>(pairs.size())});
  return FiniteJointDistribution(std::move(atoms));
}

// Grid maximum of the expected reward, written without the library oracle.
double grid_max(const FiniteJointDistribution& dist, int steps) {
  double best = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double p = i / static_cast<double>(steps);
    double value = 0.0;
    for (const auto& a : dist.atoms()) {
      value += a.weight *
               std::min(std::max(p - a.pair.seller, 0.0), std::max(a.pair.buyer - p, 0.0));
    }
    best = std::max(best, value);
  }
  return best;
}

TEST(Fgft, Examples) {
  EXPECT_DOUBLE_EQ(ftl::fgft(0.5, {0.0, 1.0}), 0.5);
  EXPECT_DOUBLE_EQ(ftl::fgft(0.3, {0.4, 0.9}), 0.0);
  EXPECT_NEAR(ftl::fgft(0.6, {0.2, 0.7}), 0.1, 1e-15);
}

TEST(Fgft, InvertedPairHasNoReward) {
  for (double p : {0.0, 0.3, 0.5, 0.8, 1.0}) EXPECT_EQ(ftl::fgft(p, {0.8, 0.2}), 0.0);
}

TEST(Gft, Examples) {
  EXPECT_NEAR(ftl::gft(0.5, {0.2, 0.8}), 0.6, 1e-15);
  EXPECT_EQ(ftl::gft(0.1, {0.2, 0.8}), 0.0);
  EXPECT_EQ(ftl::gft(0.5, {0.5, 0.5}), 0.0);
}

TEST(Gft, WeakInequalitiesAtBoundary) {
  EXPECT_NEAR(ftl::gft(0.2, {0.2, 0.8}), 0.6, 1e-15);
  EXPECT_NEAR(ftl::gft(0.8, {0.2, 0.8}), 0.6, 1e-15);
  EXPECT_EQ(ftl::gft(0.81, {0.2, 0.8}), 0.0);
}

TEST(ConvolutionApprox, HandEvaluatedSmallGrid) {
  // Terms at u = 0, .25, .5, .75: 1{0 <= .5-u} 1{.5+u <= 1} = 1, 1, 1, 0.
  EXPECT_DOUBLE_EQ(ftl::fgft_convolution_approx(0.5, {0.0, 1.0}, 4), 0.75);
  EXPECT_LE(std::abs(ftl::fgft_convolution_approx(0.5, {0.0, 1.0}, 4) - 0.5), 1.0 / 4.0);
}

TEST(ConvolutionApprox, Examples) {
  EXPECT_EQ(ftl::fgft_convolution_approx(0.3, {0.4, 0.9}, 100), 0.0);
  EXPECT_NEAR(ftl::fgft_convolution_approx(0.6, {0.2, 0.7}, 100000), 0.1, 1e-5);
}

TEST(ConvolutionApprox, ZeroGridThrows) {
  EXPECT_THROW(ftl::fgft_convolution_approx(0.5, {0.0, 1.0}, 0), std::invalid_argument);
}

TEST(ConvolutionApprox, IdentityWithinOneOverM) {
  constexpr int kGrid = 50;
  for (std::size_t m : {100u, 10000u}) {
    double worst = 0.0;
    for (int i = 0; i < kGrid; ++i) {
      for (int j = 0; j < kGrid; ++j) {
        for (int k = 0; k < kGrid; ++k) {
          const double p = i / 49.0, s = j / 49.0, b = k / 49.0;
          worst = std::max(worst,
                           std::abs(ftl::fgft_convolution_approx(p, {s, b}, m) - ftl::fgft(p, {s, b})));
        }
      }
    }
    EXPECT_LE(worst, 1.0 / static_cast<double>(m)) << "M = " << m;
  }
}

TEST(FgftProperty, Lipschitz) {
  for (int a = 0; a <= 20; ++a) {
    for (int c = 0; c <= 20; ++c) {
      const ValuationPair v{a / 20.0, c / 20.0};
      for (int i = 0; i <= 40; ++i) {
        for (int j = 0; j <= 40; ++j) {
          const double p = i / 40.0, q = j / 40.0;
          EXPECT_LE(std::abs(ftl::fgft(p, v) - ftl::fgft(q, v)), std::abs(p - q) + 1e-15);
        }
      }
    }
  }
}

TEST(FgftProperty, DominatedByGft) {
  for (int a = 0; a <= 20; ++a) {
    for (int c = 0; c <= 20; ++c) {
      const ValuationPair v{a / 20.0, c / 20.0};
      for (int i = 0; i <= 40; ++i) {
        const double p = i / 40.0;
        const double g = ftl::gft(p, v);
        if (g > 0.0) {
          EXPECT_LE(ftl::fgft(p, v), g);
        } else if (v.buyer >= v.seller) {
          EXPECT_EQ(ftl::fgft(p, v), 0.0);
        }
      }
    }
  }
}

TEST(FgftProperty, UniquePeakAtMidpoint) {
  for (int a = 0; a <= 16; ++a) {
    for (int c = a + 1; c <= 16; ++c) {
      const ValuationPair v{a / 16.0, c / 16.0};
      const double mid = 0.5 * (v.seller + v.buyer);
      const double peak = ftl::fgft(mid, v);
      EXPECT_DOUBLE_EQ(peak, 0.5 * (v.buyer - v.seller));
      for (int i = 0; i <= 256; ++i) {
        const double p = i / 256.0;
        if (p != mid) EXPECT_LT(ftl::fgft(p, v), peak);
      }
    }
  }
}

ftl::FiniteJointDistribution lb_mu() {
  return uniform_over({{0.0, 0.625}, {0.375, 0.375}, {0.625, 1.0}});
}
ftl::FiniteJointDistribution lb_nu() {
  return uniform_over({{0.0, 0.375}, {0.375, 1.0}, {0.625, 0.625}});
}

TEST(ExpectedFgft, Examples) {
  EXPECT_NEAR(ftl::expected_fgft(lb_mu(), 5.0 / 16.0), 5.0 / 48.0, 1e-15);
  EXPECT_NEAR(ftl::expected_fgft(lb_mu(), 0.5), 1.0 / 24.0, 1e-15);
  const FiniteJointDistribution trap({{{0.0, 1.0}, 0.5}, {{0.9, 1.0}, 0.5}});
  EXPECT_NEAR(ftl::expected_fgft(trap, 0.5), 0.25, 1e-15);
}

TEST(BestFixedPriceFgft, Examples) {
  const auto mu = ftl::best_fixed_price_fgft(lb_mu());
  EXPECT_DOUBLE_EQ(mu.price, 5.0 / 16.0);
  EXPECT_NEAR(mu.value, 5.0 / 48.0, 1e-15);
  const auto nu = ftl::best_fixed_price_fgft(lb_nu());
  EXPECT_DOUBLE_EQ(nu.price, 11.0 / 16.0);
  EXPECT_NEAR(nu.value, 5.0 / 48.0, 1e-15);
  const auto det = ftl::best_fixed_price_fgft(FiniteJointDistribution({{{0.2, 0.8}, 1.0}}));
  EXPECT_DOUBLE_EQ(det.price, 0.5);
  EXPECT_NEAR(det.value, 0.3, 1e-15);
}

TEST(BestFixedPriceFgft, MatchesGridBruteForce) {
  ftl::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.next() % 6;
    std::vector<ValuationPair> pairs;
    while (pairs.size() < n) {
      ValuationPair v{rng.uniform(), rng.uniform()};
      if (std::find(pairs.begin(), pairs.end(), v) == pairs.end()) pairs.push_back(v);
    }
    const auto dist = uniform_over(pairs);
    const auto exact = ftl::best_fixed_price_fgft(dist);
    const double brute = grid_max(dist, 10000);
    EXPECT_NEAR(exact.value, brute, 1e-4);
    EXPECT_GE(exact.value + 1e-12, brute);
    EXPECT_NEAR(ftl::expected_fgft(dist, exact.price), exact.value, 1e-15);
  }
}

TEST(BestFixedPriceGft, Examples) {
  const FiniteJointDistribution trap({{{0.0, 1.0}, 0.5}, {{0.9, 1.0}, 0.5}});
  const auto t = ftl::best_fixed_price_gft(trap);
  EXPECT_DOUBLE_EQ(t.price, 0.9);
  EXPECT_NEAR(t.value, 0.55, 1e-15);
  const auto det = ftl::best_fixed_price_gft(FiniteJointDistribution({{{0.2, 0.8}, 1.0}}));
  EXPECT_DOUBLE_EQ(det.price, 0.2);
  EXPECT_NEAR(det.value, 0.6, 1e-15);
}

TEST(BestFixedPriceGft, LbMuValueMatchesEnumeration) {
  // Trades (0,5/8) and (5/8,1) together only at p = 5/8: (5/8 + 3/8)/3 = 1/3.
  // A value of 11/24 is not attainable at any price.
  const auto best = ftl::best_fixed_price_gft(lb_mu());
  double brute = 0.0;
  for (int i = 0; i <= 8000; ++i) brute = std::max(brute, ftl::expected_gft(lb_mu(), i / 8000.0));
  EXPECT_NEAR(best.value, brute, 1e-15);
  EXPECT_NEAR(best.value, 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(best.price, 0.625);
}

TEST(EmpiricalBestPrice, Examples) {
  const std::vector<ValuationPair> one{{0.0, 1.0}};
  const auto a = ftl::empirical_best_price(one);
  EXPECT_DOUBLE_EQ(a.price, 0.5);
  EXPECT_DOUBLE_EQ(a.value, 0.5);
  const std::vector<ValuationPair> two{{0.0, 1.0}, {0.5, 0.5}};
  const auto b = ftl::empirical_best_price(two);
  EXPECT_DOUBLE_EQ(b.price, 0.5);
  EXPECT_DOUBLE_EQ(b.value, 0.25);
  const std::vector<ValuationPair> tie{{0.0, 0.5}, {0.5, 1.0}};
  const auto c = ftl::empirical_best_price(tie);
  EXPECT_DOUBLE_EQ(c.price, 0.25);
  EXPECT_DOUBLE_EQ(c.value, 0.125);
}

TEST(EmpiricalBestPrice, EmptyThrows) {
  EXPECT_THROW(ftl::empirical_best_price({}), std::invalid_argument);
}

TEST(EmpiricalBestPrice, DuplicatesCountWithMultiplicity) {
  const std::vector<ValuationPair> samples{{0.0, 0.5}, {0.5, 1.0}, {0.5, 1.0}};
  const auto best = ftl::empirical_best_price(samples);
  EXPECT_DOUBLE_EQ(best.price, 0.75);
  EXPECT_NEAR(best.value, 2.0 / 12.0, 1e-15);
}

TEST(MaximizeWeighted, UnnormalizedWeightsScaleValue) {
  const std::vector<JointAtom> atoms{{{0.0, 1.0}, 4.0}};
  const auto best = ftl::maximize_weighted_fgft(atoms);
  EXPECT_DOUBLE_EQ(best.price, 0.5);
  EXPECT_DOUBLE_EQ(best.value, 2.0);
}

TEST(Breakpoints, ContainEndpointsAndAtomCoordinates) {
  const std::vector<JointAtom> atoms{{{0.2, 0.6}, 1.0}};
  const auto set = ftl::fgft_breakpoints(atoms);
  for (double p : {0.0, 0.2, 0.4, 0.6, 1.0}) EXPECT_TRUE(set.contains(p)) << p;
  EXPECT_EQ(set.size(), 5u);
  EXPECT_TRUE(std::is_sorted(set.points().begin(), set.points().end()));
}

TEST(DiscreteConvolution, Examples) {
  const std::vector<std::uint8_t> v{1, 1}, w{1, 0}, zero{0, 0, 0};
  EXPECT_DOUBLE_EQ(ftl::discrete_convolution_score(v, w, 1, 2), 0.5);
  EXPECT_DOUBLE_EQ(ftl::discrete_convolution_score(v, w, 2, 2), 0.0);
  const std::vector<std::uint8_t> ones{1, 1, 1};
  for (std::size_t i = 1; i <= 3; ++i) {
    EXPECT_EQ(ftl::discrete_convolution_score(zero, ones, i, 3), 0.0);
  }
}

TEST(DiscreteConvolution, RejectsBadArguments) {
  const std::vector<std::uint8_t> v{1, 1}, w{1, 0};
  EXPECT_THROW(ftl::discrete_convolution_score(v, w, 0, 2), std::invalid_argument);
  EXPECT_THROW(ftl::discrete_convolution_score(v, w, 3, 2), std::invalid_argument);
  EXPECT_THROW(ftl::discrete_convolution_score(v, w, 1, 3), std::invalid_argument);
}

TEST(DiscreteConvolution, ArgmaxIsSmallestMaximizer) {
  const std::vector<std::uint8_t> v{1, 1}, w{1, 0};
  EXPECT_EQ(ftl::convolution_argmax(v, w), 1u);
  // Indices 2 and 3 both score 1/4; the smaller wins.
  const std::vector<std::uint8_t> s{0, 1, 1, 1}, b{1, 1, 1, 0};
  EXPECT_EQ(ftl::convolution_argmax(s, b), 2u);
}

}  // namespace
