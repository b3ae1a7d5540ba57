#pragma once

#include <compare>
#include <span>
#include <vector>

namespace ftl {

/// A posted price. Every price the library produces lies in [0, 1].
using Price = double;

/// Private valuations of the seller and the buyer for one round.
///
/// No ordering is imposed: a pair with buyer < seller is legal and simply
/// admits no trade with positive surplus.
struct ValuationPair {
  double seller = 0.0;
  double buyer = 0.0;

  friend auto operator<=>(const ValuationPair&, const ValuationPair&) = default;
};

struct JointAtom {
  ValuationPair pair;
  double weight = 0.0;
};

struct MarginalAtom {
  double value = 0.0;
  double weight = 0.0;
};

/// Weight-sum tolerance shared by every finite distribution.
inline constexpr double kWeightTolerance = 1e-12;

/// Distribution of a single valuation with finite support.
///
/// Weights are strictly positive and sum to one; support values are
/// distinct and lie in [0, 1]. Atom order is the construction order and is
/// preserved (it determines inverse-CDF sampling).
class FiniteMarginal {
 public:
  explicit FiniteMarginal(std::vector<MarginalAtom> atoms);

  std::span<const MarginalAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  /// P[X <= x].
  double cdf(double x) const;
  /// P[X >= x].
  double survival(double x) const;

 private:
  std::vector<MarginalAtom> atoms_;
};

/// Joint distribution of (seller, buyer) with finite support over [0,1]^2.
///
/// Weights are strictly positive and sum to one; atoms are pairwise distinct.
class FiniteJointDistribution {
 public:
  explicit FiniteJointDistribution(std::vector<JointAtom> atoms);

  /// Product measure of two independent marginals, seller-major order.
  static FiniteJointDistribution product(const FiniteMarginal& seller,
                                         const FiniteMarginal& buyer);

  /// Uniform distribution over a sample list; repeated pairs are merged and
  /// atoms appear in order of first occurrence.
  static FiniteJointDistribution empirical(std::span<const ValuationPair> samples);

  std::span<const JointAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<JointAtom> atoms_;
};

/// Sorted, deduplicated candidate prices, always containing 0 and 1.
class BreakpointSet {
 public:
  BreakpointSet() : points_{0.0, 1.0} {}
  explicit BreakpointSet(std::vector<double> points);

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool contains(double p) const;

 private:
  std::vector<double> points_;
};

}  // namespace ftl
