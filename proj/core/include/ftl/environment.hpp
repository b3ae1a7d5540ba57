#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ftl/random.hpp"
#include "ftl/types.hpp"

namespace ftl {

enum class FeedbackModel { TwoBit, Full };

std::string_view to_string(FeedbackModel model);
/// Accepts "two-bit" and "full". Throws ConfigError otherwise.
FeedbackModel parse_feedback_model(std::string_view text);

struct TwoBitFeedback {
  bool seller_accepts = false;
  bool buyer_accepts = false;

  friend bool operator==(const TwoBitFeedback&, const TwoBitFeedback&) = default;
};

struct FullObservation {
  ValuationPair pair;
};

using Feedback = std::variant<TwoBitFeedback, FullObservation>;

TwoBitFeedback two_bit_feedback(Price p, ValuationPair v);
Feedback render_feedback(FeedbackModel model, Price p, ValuationPair v);

namespace env {

struct Deterministic {
  double seller;
  double buyer;
};
struct IndependentFinite {
  FiniteMarginal seller;
  FiniteMarginal buyer;
};
struct JointFinite {
  FiniteJointDistribution dist;
};
/// (1/3)(d(0,5/8) + d(3/8,3/8) + d(5/8,1)), atoms in that order.
struct LbMu {};
/// (1/3)(d(0,3/8) + d(3/8,1) + d(5/8,5/8)), atoms in that order.
struct LbNu {};
/// Seller 0 or 1-h with probability 1/2 each (in that order), buyer 1.
struct GftTrap {
  double h;
};
/// Seller 0 w.p. (1+eps)/2 then 1/4 w.p. (1-eps)/2, buyer 1.
struct EpsilonFamily {
  double epsilon;
};

}  // namespace env

/// An immutable i.i.d. valuation environment.
///
/// Every variant reduces to a finite joint distribution, computed once at
/// construction. Sampling is inverse-CDF over that joint's atom order, one
/// uniform per draw.
class EnvironmentSpec {
 public:
  using Variant = std::variant<env::Deterministic, env::IndependentFinite, env::JointFinite,
                               env::LbMu, env::LbNu, env::GftTrap, env::EpsilonFamily>;

  static EnvironmentSpec deterministic(double seller, double buyer);
  static EnvironmentSpec independent(FiniteMarginal seller, FiniteMarginal buyer);
  static EnvironmentSpec joint(FiniteJointDistribution dist);
  static EnvironmentSpec lb_mu();
  static EnvironmentSpec lb_nu();
  static EnvironmentSpec gft_trap(double h);
  static EnvironmentSpec epsilon_family(double epsilon);

  const Variant& variant() const { return variant_; }
  const FiniteJointDistribution& joint() const { return joint_; }

  /// Canonical id ("lb-mu", "det:s=0.2,b=0.8", ...) or the label, if set.
  std::string id() const;
  EnvironmentSpec& with_label(std::string label);

  /// True when seller and buyer valuations are independent by construction.
  bool independent_by_construction() const;

  /// Atom drawn by inverse CDF at u in [0, 1).
  ValuationPair at_quantile(double u) const;

 private:
  EnvironmentSpec(Variant variant, FiniteJointDistribution joint);

  Variant variant_;
  FiniteJointDistribution joint_;
  std::vector<double> cumulative_;
  std::optional<std::string> label_;
};

FiniteJointDistribution as_joint(const EnvironmentSpec& env);

/// Draws one valuation pair, consuming exactly one uniform from rng.
ValuationPair sample_valuations(const EnvironmentSpec& env, Rng& rng);

/// Outcome probabilities indexed by outcome_index(feedback):
/// 0 -> (1,1), 1 -> (1,0), 2 -> (0,1), 3 -> (0,0).
using FeedbackProbabilities = std::array<double, 4>;

constexpr std::size_t outcome_index(TwoBitFeedback f) {
  return (f.seller_accepts ? 0 : 2) + (f.buyer_accepts ? 0 : 1);
}
constexpr TwoBitFeedback outcome_at(std::size_t index) {
  return {index < 2, index % 2 == 0};
}

FeedbackProbabilities feedback_distribution(const EnvironmentSpec& env, Price p);

/// Feedback law on one price region: either the single point {lo} (lo == hi)
/// or the open interval (lo, hi).
struct FeedbackRegion {
  double lo = 0.0;
  double hi = 0.0;
  Price representative = 0.0;
  FeedbackProbabilities probabilities{};
};

struct FeedbackDistributionTable {
  std::vector<FeedbackRegion> regions;
};

/// Support coordinates of the environment together with 0 and 1, sorted.
std::vector<double> support_coordinates(const EnvironmentSpec& env);

/// Feedback law on every region induced by the given sorted boundaries:
/// each boundary point and each open gap between consecutive boundaries.
FeedbackDistributionTable feedback_table(const EnvironmentSpec& env,
                                         std::span<const double> boundaries);
FeedbackDistributionTable feedback_table(const EnvironmentSpec& env);

/// Resolves a string id: "lb-mu", "lb-nu", "gft-trap:h=H", "eps-family:eps=E",
/// "det:s=S,b=B". Throws IdResolutionError for unknown names and ConfigError
/// for malformed or out-of-range parameters.
EnvironmentSpec parse_environment(std::string_view id);

/// Resolves an inline JSON environment: either a string id, or an object
///   {"type": "joint", "atoms": [[s, b, w], ...], "name": "..."}
///   {"type": "independent", "seller": [[v, w], ...], "buyer": [[v, w], ...]}
EnvironmentSpec parse_environment_json(std::string_view json_text);

struct RegistryEntry {
  std::string pattern;
  std::string description;
};
std::vector<RegistryEntry> registered_environments();

}  // namespace ftl
