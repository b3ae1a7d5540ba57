#include "ftl/reward.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace ftl {

double fgft(Price p, ValuationPair v) {
  const double seller_surplus = std::max(p - v.seller, 0.0);
  const double buyer_surplus = std::max(v.buyer - p, 0.0);
  return std::min(seller_surplus, buyer_surplus);
}

double gft(Price p, ValuationPair v) {
  return (v.seller <= p && p <= v.buyer) ? v.buyer - v.seller : 0.0;
}

double fgft_convolution_approx(Price p, ValuationPair v, std::size_t grid_size) {
  if (grid_size == 0) throw std::invalid_argument("convolution grid size must be positive");
  const double m = static_cast<double>(grid_size);
  // Stops at the first zero of the non-increasing integrand.
  std::size_t hits = 0;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double u = static_cast<double>(j) / m;
    if (!(v.seller <= p - u && p + u <= v.buyer)) break;
    ++hits;
  }
  return static_cast<double>(hits) / m;
}

double expected_fgft(const FiniteJointDistribution& dist, Price p) {
  double total = 0.0;
  for (const auto& atom : dist.atoms()) total += atom.weight * fgft(p, atom.pair);
  return total;
}

double expected_gft(const FiniteJointDistribution& dist, Price p) {
  double total = 0.0;
  for (const auto& atom : dist.atoms()) total += atom.weight * gft(p, atom.pair);
  return total;
}

BreakpointSet fgft_breakpoints(std::span<const JointAtom> atoms) {
  std::vector<double> points;
  points.reserve(3 * atoms.size());
  for (const auto& atom : atoms) {
    points.push_back(atom.pair.seller);
    points.push_back(atom.pair.buyer);
    points.push_back(0.5 * (atom.pair.seller + atom.pair.buyer));
  }
  return BreakpointSet(std::move(points));
}

BreakpointSet gft_candidates(std::span<const JointAtom> atoms) {
  std::vector<double> coords{0.0, 1.0};
  for (const auto& atom : atoms) {
    coords.push_back(atom.pair.seller);
    coords.push_back(atom.pair.buyer);
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  const std::size_t n = coords.size();
  for (std::size_t i = 0; i + 1 < n; ++i) coords.push_back(0.5 * (coords[i] + coords[i + 1]));
  return BreakpointSet(std::move(coords));
}

namespace {

template <typename Reward>
PricedValue maximize_over(const BreakpointSet& candidates, std::span<const JointAtom> atoms,
                          Reward reward) {
  PricedValue best{0.0, -1.0};
  for (double p : candidates.points()) {
    double value = 0.0;
    for (const auto& atom : atoms) value += atom.weight * reward(p, atom.pair);
    // Strict comparison over ascending candidates keeps the smallest maximizer.
    if (value > best.value) best = {p, value};
  }
  return best;
}

}  // namespace

PricedValue maximize_weighted_fgft(std::span<const JointAtom> atoms) {
  return maximize_over(fgft_breakpoints(atoms), atoms, fgft);
}

PricedValue best_fixed_price_fgft(const FiniteJointDistribution& dist) {
  return maximize_weighted_fgft(dist.atoms());
}

PricedValue best_fixed_price_gft(const FiniteJointDistribution& dist) {
  return maximize_over(gft_candidates(dist.atoms()), dist.atoms(), gft);
}

PricedValue empirical_best_price(std::span<const ValuationPair> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical_best_price needs samples");
  // Same count-weighted path as the follow-the-best-empirical learner.
  std::map<ValuationPair, std::size_t> slot;
  std::vector<JointAtom> counts;
  for (const auto& pair : samples) {
    auto [it, inserted] = slot.try_emplace(pair, counts.size());
    if (inserted) counts.push_back({pair, 0.0});
    counts[it->second].weight += 1.0;
  }
  auto best = maximize_weighted_fgft(counts);
  best.value /= static_cast<double>(samples.size());
  return best;
}

namespace {

void check_bits(std::span<const std::uint8_t> seller_bits, std::span<const std::uint8_t> buyer_bits,
                std::size_t grid_size) {
  if (seller_bits.size() != grid_size || buyer_bits.size() != grid_size) {
    throw std::invalid_argument("bit arrays must hold exactly K entries");
  }
}

// Number of k in [0, K) with V_{i-k} = W_{i+k} = 1, for 1-based i.
std::size_t convolution_count(std::span<const std::uint8_t> v, std::span<const std::uint8_t> w,
                              std::size_t i) {
  const std::size_t k_grid = v.size();
  const std::size_t k_max = std::min(i - 1, k_grid - i);
  std::size_t count = 0;
  for (std::size_t k = 0; k <= k_max; ++k) count += v[i - 1 - k] & w[i - 1 + k];
  return count;
}

}  // namespace

double discrete_convolution_score(std::span<const std::uint8_t> seller_bits,
                                  std::span<const std::uint8_t> buyer_bits, std::size_t index,
                                  std::size_t grid_size) {
  check_bits(seller_bits, buyer_bits, grid_size);
  if (index < 1 || index > grid_size) {
    throw std::invalid_argument("convolution index must lie in [1, K]");
  }
  return static_cast<double>(convolution_count(seller_bits, buyer_bits, index)) /
         static_cast<double>(grid_size);
}

std::size_t convolution_argmax(std::span<const std::uint8_t> seller_bits,
                               std::span<const std::uint8_t> buyer_bits) {
  const std::size_t k_grid = seller_bits.size();
  check_bits(seller_bits, buyer_bits, k_grid);
  if (k_grid == 0) throw std::invalid_argument("convolution grid is empty");
  std::size_t best_index = 1;
  std::size_t best_count = 0;
  for (std::size_t i = 1; i <= k_grid; ++i) {
    const std::size_t count = convolution_count(seller_bits, buyer_bits, i);
    if (count > best_count) {
      best_count = count;
      best_index = i;
    }
  }
  return best_index;
}

}  // namespace ftl
