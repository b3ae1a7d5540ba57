#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ftl/environment.hpp"
#include "ftl/random.hpp"
#include "ftl/types.hpp"

namespace ftl {

/// Posted-price learner driven through init / propose / update.
///
/// Exactly one update must follow each propose; violating the protocol
/// throws std::logic_error. init may be called again to restart.
class Learner {
 public:
  virtual ~Learner() = default;

  /// Throws ConfigError when the learner cannot run under `model` (or, with
  /// strict set, when it would need to derive its native feedback from it).
  void init(std::size_t horizon, FeedbackModel model, bool strict = false);
  Price propose();
  void update(const Feedback& feedback);

  virtual std::string id() const = 0;
  /// Feedback the learner is written against; nullopt if it ignores feedback.
  virtual std::optional<FeedbackModel> native_feedback() const = 0;

  std::size_t horizon() const { return horizon_; }
  std::size_t round() const { return round_; }

 protected:
  virtual void on_init(std::size_t horizon) = 0;
  virtual Price on_propose() = 0;
  virtual void on_update(const Feedback& feedback, Price posted) = 0;

  /// Two-bit view of any feedback for the last posted price.
  static TwoBitFeedback as_two_bit(const Feedback& feedback, Price posted);

 private:
  std::size_t horizon_ = 0;
  std::size_t round_ = 0;
  bool initialized_ = false;
  std::optional<Price> pending_;
};

/// Explore-then-commit on the grid {1/K, ..., K/K} using the discrete
/// convolution of seller-accept and buyer-accept bits.
class ConvolutionPricing final : public Learner {
 public:
  /// K defaults to floor(T^{2/3}) at init.
  explicit ConvolutionPricing(std::optional<std::size_t> grid_size = std::nullopt);

  std::string id() const override;
  std::optional<FeedbackModel> native_feedback() const override { return FeedbackModel::TwoBit; }

  std::size_t grid_size() const { return grid_; }
  std::span<const std::uint8_t> seller_bits() const { return seller_bits_; }
  std::span<const std::uint8_t> buyer_bits() const { return buyer_bits_; }
  std::optional<std::size_t> committed_index() const { return committed_; }

  /// Largest K with K^3 <= T^2, in exact integer arithmetic.
  static std::size_t default_grid_size(std::size_t horizon);

 protected:
  void on_init(std::size_t horizon) override;
  Price on_propose() override;
  void on_update(const Feedback& feedback, Price posted) override;

 private:
  std::optional<std::size_t> requested_grid_;
  std::size_t grid_ = 0;
  std::vector<std::uint8_t> seller_bits_;
  std::vector<std::uint8_t> buyer_bits_;
  std::optional<std::size_t> committed_;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double mid() const { return 0.5 * (lo + hi); }
  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Bisects the seller value, then the buyer value, then commits to the
/// average of the two interval midpoints.
class DoubleBinarySearch final : public Learner {
 public:
  enum class Phase { Seller, Buyer, Commit };

  std::string id() const override { return "dbs"; }
  std::optional<FeedbackModel> native_feedback() const override { return FeedbackModel::TwoBit; }

  /// ceil(log2 T) if 2 ceil(log2 T) + 1 <= T, else 0.
  static std::size_t search_depth(std::size_t horizon);

  std::size_t depth() const { return depth_; }
  Phase phase() const;
  const Interval& seller_interval() const { return seller_; }
  const Interval& buyer_interval() const { return buyer_; }
  Price commit_price() const { return 0.5 * (seller_.mid() + buyer_.mid()); }

 protected:
  void on_init(std::size_t horizon) override;
  Price on_propose() override;
  void on_update(const Feedback& feedback, Price posted) override;

 private:
  std::size_t depth_ = 0;
  std::size_t steps_ = 0;
  Interval seller_;
  Interval buyer_;
};

/// Full-feedback learner posting the empirical FGFT maximizer of all
/// observations so far (1/2 before any observation).
///
/// Observations are kept as distinct pairs with multiplicities, which is
/// equivalent to the raw sample list for the argmax.
class FollowBestEmpirical final : public Learner {
 public:
  std::string id() const override { return "fbep"; }
  std::optional<FeedbackModel> native_feedback() const override { return FeedbackModel::Full; }

  std::size_t observations() const { return observed_; }
  /// Distinct observed pairs, weight = multiplicity, in order of first sight.
  std::span<const JointAtom> counts() const { return counts_; }

 protected:
  void on_init(std::size_t horizon) override;
  Price on_propose() override { return next_; }
  void on_update(const Feedback& feedback, Price posted) override;

 private:
  std::map<ValuationPair, std::size_t> slot_;
  std::vector<JointAtom> counts_;
  std::size_t observed_ = 0;
  Price next_ = 0.5;
};

class FixedPrice final : public Learner {
 public:
  /// Throws std::invalid_argument if price is outside [0, 1].
  explicit FixedPrice(Price price);

  std::string id() const override;
  std::optional<FeedbackModel> native_feedback() const override { return std::nullopt; }
  Price price() const { return price_; }

 protected:
  void on_init(std::size_t) override {}
  Price on_propose() override { return price_; }
  void on_update(const Feedback&, Price) override {}

 private:
  Price price_;
};

/// Posts the fixed price that maximizes expected GFT under the true
/// environment. A comparator, not a statistical learner.
class GftOracleFixed final : public Learner {
 public:
  explicit GftOracleFixed(const EnvironmentSpec& env);

  std::string id() const override { return "gft-oracle"; }
  std::optional<FeedbackModel> native_feedback() const override { return std::nullopt; }
  Price price() const { return price_; }

 protected:
  void on_init(std::size_t) override {}
  Price on_propose() override { return price_; }
  void on_update(const Feedback&, Price) override {}

 private:
  Price price_;
};

/// Independent uniform prices from its own seeded generator. init restarts
/// the stream, so every run from init reproduces the same sequence.
class UniformRandom final : public Learner {
 public:
  explicit UniformRandom(std::uint64_t seed);

  std::string id() const override;
  std::optional<FeedbackModel> native_feedback() const override { return std::nullopt; }

 protected:
  void on_init(std::size_t) override { rng_ = Rng(seed_); }
  Price on_propose() override { return rng_.uniform(); }
  void on_update(const Feedback&, Price) override {}

 private:
  std::uint64_t seed_;
  Rng rng_;
};

std::unique_ptr<Learner> convolution_pricing(std::optional<std::size_t> grid_size = std::nullopt);
std::unique_ptr<Learner> double_binary_search();
std::unique_ptr<Learner> follow_best_empirical();
std::unique_ptr<Learner> fixed_price(Price p);
std::unique_ptr<Learner> gft_oracle_fixed(const EnvironmentSpec& env);
std::unique_ptr<Learner> uniform_random(std::uint64_t seed);

/// Per-episode inputs for learners that need randomness.
struct LearnerContext {
  std::uint64_t episode_seed = 0;
  std::uint64_t episode_index = 0;
};

/// Resolves "conv-pricing", "conv-pricing:K=N", "dbs", "fbep", "fixed:p=P",
/// "gft-oracle", "uniform" or "uniform:seed=S".
///
/// "uniform" draws from a stream derived from the episode seed;
/// "uniform:seed=S" uses mix_seed(S, episode_index). Throws
/// IdResolutionError for unknown names, ConfigError for bad parameters.
std::unique_ptr<Learner> make_learner(std::string_view id, const EnvironmentSpec& env,
                                      const LearnerContext& context = {});

/// Validates the id without needing an environment.
void check_learner_id(std::string_view id);

std::vector<RegistryEntry> registered_learners();

}  // namespace ftl
