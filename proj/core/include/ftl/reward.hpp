#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "ftl/types.hpp"

namespace ftl {

/// Fair gain from trade: min{(p - s)+, (b - p)+}. Result lies in [0, 1/2].
double fgft(Price p, ValuationPair v);

/// Gain from trade: (b - s) if s <= p <= b, else 0.
double gft(Price p, ValuationPair v);

/// Left Riemann sum of the convolution integrand
///   (1/M) sum_{j=0}^{M-1} 1{s <= p - j/M} 1{p + j/M <= b},
/// which is within 1/M of fgft(p, v). Throws std::invalid_argument if M == 0.
double fgft_convolution_approx(Price p, ValuationPair v, std::size_t grid_size);

double expected_fgft(const FiniteJointDistribution& dist, Price p);
double expected_gft(const FiniteJointDistribution& dist, Price p);

struct PricedValue {
  Price price = 0.0;
  double value = 0.0;
};

/// Every price where p -> expected_fgft can change slope: 0, 1, and each
/// atom's seller value, buyer value and midpoint.
BreakpointSet fgft_breakpoints(std::span<const JointAtom> atoms);

/// Candidate maximizers of the piecewise-constant expected GFT: 0, 1, every
/// support coordinate and the midpoints between consecutive coordinates.
BreakpointSet gft_candidates(std::span<const JointAtom> atoms);

/// Maximizes p -> sum_i w_i fgft(p, v_i) over [0, 1] for arbitrary
/// non-negative weights (they need not sum to one). Returns the smallest
/// maximizing price and the weighted sum there.
PricedValue maximize_weighted_fgft(std::span<const JointAtom> atoms);

/// Exact best fixed price for the expected FGFT; smallest maximizer wins.
PricedValue best_fixed_price_fgft(const FiniteJointDistribution& dist);

/// Exact best fixed price for the expected GFT; smallest maximizer wins.
PricedValue best_fixed_price_gft(const FiniteJointDistribution& dist);

/// Maximizer of the empirical mean FGFT over a non-empty sample list.
/// Throws std::invalid_argument on an empty list.
PricedValue empirical_best_price(std::span<const ValuationPair> samples);

/// Discrete incomplete convolution score of index i (1-based):
///   (1/K) sum_{k=0}^{K-1} V_{i-k} W_{i+k},
/// where V and W hold bits for indices 1..K (element 0 is index 1) and any
/// index outside [1, K] reads as 0. Throws std::invalid_argument if i is
/// outside [1, K] or the bit arrays do not have K entries.
double discrete_convolution_score(std::span<const std::uint8_t> seller_bits,
                                  std::span<const std::uint8_t> buyer_bits,
                                  std::size_t index, std::size_t grid_size);

/// Smallest index in [1, K] maximizing discrete_convolution_score.
std::size_t convolution_argmax(std::span<const std::uint8_t> seller_bits,
                               std::span<const std::uint8_t> buyer_bits);

}  // namespace ftl
