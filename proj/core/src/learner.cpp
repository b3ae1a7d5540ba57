#include "ftl/learner.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ftl/errors.hpp"
#include "ftl/reward.hpp"

namespace ftl {

void Learner::init(std::size_t horizon, FeedbackModel model, bool strict) {
  if (horizon == 0) throw ConfigError("horizon must be at least 1");
  const auto native = native_feedback();
  if (native == FeedbackModel::Full && model == FeedbackModel::TwoBit) {
    throw ConfigError("learner '" + id() + "' needs full feedback but the run is two-bit");
  }
  if (native == FeedbackModel::TwoBit && model == FeedbackModel::Full && strict) {
    throw ConfigError("learner '" + id() +
                      "' is a two-bit learner; strict feedback forbids deriving bits from full "
                      "observations");
  }
  on_init(horizon);
  horizon_ = horizon;
  round_ = 0;
  pending_.reset();
  initialized_ = true;
}

Price Learner::propose() {
  if (!initialized_) throw std::logic_error("propose() before init()");
  if (pending_) throw std::logic_error("propose() called twice without update()");
  const Price p = on_propose();
  pending_ = p;
  ++round_;
  return p;
}

void Learner::update(const Feedback& feedback) {
  if (!pending_) throw std::logic_error("update() without a preceding propose()");
  const Price posted = *pending_;
  pending_.reset();
  on_update(feedback, posted);
}

TwoBitFeedback Learner::as_two_bit(const Feedback& feedback, Price posted) {
  if (const auto* bits = std::get_if<TwoBitFeedback>(&feedback)) return *bits;
  return two_bit_feedback(posted, std::get<FullObservation>(feedback).pair);
}

namespace {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

// ConvolutionPricing

ConvolutionPricing::ConvolutionPricing(std::optional<std::size_t> grid_size)
    : requested_grid_(grid_size) {
  if (requested_grid_ && *requested_grid_ == 0) {
    throw ConfigError("conv-pricing: K must be at least 1");
  }
}

std::string ConvolutionPricing::id() const {
  return requested_grid_ ? "conv-pricing:K=" + std::to_string(*requested_grid_) : "conv-pricing";
}

std::size_t ConvolutionPricing::default_grid_size(std::size_t horizon) {
  __extension__ typedef unsigned __int128 u128;
  const u128 square = static_cast<u128>(horizon) * horizon;
  auto k = static_cast<std::size_t>(std::cbrt(static_cast<long double>(square)));
  auto cube = [](std::size_t x) { return static_cast<u128>(x) * x * x; };
  while (k > 0 && cube(k) > square) --k;
  while (cube(k + 1) <= square) ++k;
  return k;
}

void ConvolutionPricing::on_init(std::size_t horizon) {
  const std::size_t k = requested_grid_.value_or(default_grid_size(horizon));
  if (k == 0 || k > horizon) {
    throw ConfigError("conv-pricing: K = " + std::to_string(k) + " must lie in [1, T = " +
                      std::to_string(horizon) + "]");
  }
  grid_ = k;
  seller_bits_.assign(k, 0);
  buyer_bits_.assign(k, 0);
  committed_.reset();
}

Price ConvolutionPricing::on_propose() {
  const std::size_t t = round() + 1;
  const auto k = static_cast<double>(grid_);
  if (t <= grid_) return static_cast<double>(t) / k;
  return static_cast<double>(*committed_) / k;
}

void ConvolutionPricing::on_update(const Feedback& feedback, Price posted) {
  const std::size_t t = round();
  if (t > grid_) return;
  const auto bits = as_two_bit(feedback, posted);
  seller_bits_[t - 1] = bits.seller_accepts ? 1 : 0;
  buyer_bits_[t - 1] = bits.buyer_accepts ? 1 : 0;
  if (t == grid_) committed_ = convolution_argmax(seller_bits_, buyer_bits_);
}

// DoubleBinarySearch

std::size_t DoubleBinarySearch::search_depth(std::size_t horizon) {
  std::size_t ceil_log2 = 0;
  while ((std::size_t{1} << ceil_log2) < horizon) ++ceil_log2;
  return 2 * ceil_log2 + 1 <= horizon ? ceil_log2 : 0;
}

DoubleBinarySearch::Phase DoubleBinarySearch::phase() const {
  if (steps_ < depth_) return Phase::Seller;
  if (steps_ < 2 * depth_) return Phase::Buyer;
  return Phase::Commit;
}

void DoubleBinarySearch::on_init(std::size_t horizon) {
  depth_ = search_depth(horizon);
  steps_ = 0;
  seller_ = Interval{};
  buyer_ = Interval{};
}

Price DoubleBinarySearch::on_propose() {
  switch (phase()) {
    case Phase::Seller:
      return seller_.mid();
    case Phase::Buyer:
      return buyer_.mid();
    case Phase::Commit:
      break;
  }
  return commit_price();
}

void DoubleBinarySearch::on_update(const Feedback& feedback, Price posted) {
  const auto bits = as_two_bit(feedback, posted);
  switch (phase()) {
    case Phase::Seller:
      // Seller accepts at s == posted, so the left half keeps s.
      if (bits.seller_accepts) {
        seller_.hi = posted;
      } else {
        seller_.lo = posted;
      }
      ++steps_;
      break;
    case Phase::Buyer:
      if (bits.buyer_accepts) {
        buyer_.lo = posted;
      } else {
        buyer_.hi = posted;
      }
      ++steps_;
      break;
    case Phase::Commit:
      break;
  }
}

// FollowBestEmpirical

void FollowBestEmpirical::on_init(std::size_t) {
  slot_.clear();
  counts_.clear();
  observed_ = 0;
  next_ = 0.5;
}

void FollowBestEmpirical::on_update(const Feedback& feedback, Price) {
  const auto* observation = std::get_if<FullObservation>(&feedback);
  if (observation == nullptr) {
    throw std::invalid_argument("fbep cannot learn from two-bit feedback");
  }
  auto [it, inserted] = slot_.try_emplace(observation->pair, counts_.size());
  if (inserted) counts_.push_back({observation->pair, 0.0});
  counts_[it->second].weight += 1.0;
  ++observed_;
  next_ = maximize_weighted_fgft(counts_).price;
}

// Comparators

FixedPrice::FixedPrice(Price price) : price_(price) {
  if (!(price >= 0.0 && price <= 1.0)) throw std::invalid_argument("fixed price must lie in [0,1]");
}

std::string FixedPrice::id() const { return "fixed:p=" + format_number(price_); }

GftOracleFixed::GftOracleFixed(const EnvironmentSpec& env)
    : price_(best_fixed_price_gft(env.joint()).price) {}

UniformRandom::UniformRandom(std::uint64_t seed) : seed_(seed), rng_(seed) {}

std::string UniformRandom::id() const { return "uniform:seed=" + std::to_string(seed_); }

std::unique_ptr<Learner> convolution_pricing(std::optional<std::size_t> grid_size) {
  return std::make_unique<ConvolutionPricing>(grid_size);
}
std::unique_ptr<Learner> double_binary_search() { return std::make_unique<DoubleBinarySearch>(); }
std::unique_ptr<Learner> follow_best_empirical() { return std::make_unique<FollowBestEmpirical>(); }
std::unique_ptr<Learner> fixed_price(Price p) { return std::make_unique<FixedPrice>(p); }
std::unique_ptr<Learner> gft_oracle_fixed(const EnvironmentSpec& env) {
  return std::make_unique<GftOracleFixed>(env);
}
std::unique_ptr<Learner> uniform_random(std::uint64_t seed) {
  return std::make_unique<UniformRandom>(seed);
}

// Id resolution

namespace {

struct ParsedId {
  std::string_view name;
  std::string_view key;
  std::string_view value;
  bool has_param = false;
};

ParsedId split_id(std::string_view id) {
  ParsedId parsed{id.substr(0, id.find(':')), {}, {}, false};
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) return parsed;
  const auto param = id.substr(colon + 1);
  const auto eq = param.find('=');
  if (eq == std::string_view::npos || param.find(',') != std::string_view::npos) {
    throw ConfigError("malformed learner id '" + std::string(id) + "'");
  }
  parsed.key = param.substr(0, eq);
  parsed.value = param.substr(eq + 1);
  parsed.has_param = true;
  return parsed;
}

template <typename T>
T parse_value(std::string_view id, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("bad parameter value '" + std::string(text) + "' in learner id '" +
                      std::string(id) + "'");
  }
  return value;
}

void expect_key(const ParsedId& parsed, std::string_view id, std::string_view key) {
  if (parsed.has_param && parsed.key != key) {
    throw ConfigError("learner id '" + std::string(id) + "' has unknown parameter '" +
                      std::string(parsed.key) + "'");
  }
}

void expect_no_param(const ParsedId& parsed, std::string_view id) {
  if (parsed.has_param) {
    throw ConfigError("learner id '" + std::string(id) + "' takes no parameters");
  }
}

// Resolves the id; env is only consulted by the GFT oracle.
std::unique_ptr<Learner> resolve(std::string_view id, const EnvironmentSpec* env,
                                 const LearnerContext& context) {
  const auto parsed = split_id(id);
  if (parsed.name == "conv-pricing") {
    expect_key(parsed, id, "K");
    if (!parsed.has_param) return convolution_pricing();
    return convolution_pricing(parse_value<std::size_t>(id, parsed.value));
  }
  if (parsed.name == "dbs") {
    expect_no_param(parsed, id);
    return double_binary_search();
  }
  if (parsed.name == "fbep") {
    expect_no_param(parsed, id);
    return follow_best_empirical();
  }
  if (parsed.name == "fixed") {
    if (!parsed.has_param) throw ConfigError("learner id 'fixed' needs p=PRICE");
    expect_key(parsed, id, "p");
    const auto p = parse_value<double>(id, parsed.value);
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("fixed price must lie in [0,1]");
    return fixed_price(p);
  }
  if (parsed.name == "gft-oracle") {
    expect_no_param(parsed, id);
    if (env == nullptr) return nullptr;
    return gft_oracle_fixed(*env);
  }
  if (parsed.name == "uniform") {
    expect_key(parsed, id, "seed");
    if (!parsed.has_param) return uniform_random(mix_seed(context.episode_seed, 1));
    const auto seed = parse_value<std::uint64_t>(id, parsed.value);
    return uniform_random(mix_seed(seed, context.episode_index));
  }
  throw IdResolutionError("learner", std::string(id));
}

}  // namespace

std::unique_ptr<Learner> make_learner(std::string_view id, const EnvironmentSpec& env,
                                      const LearnerContext& context) {
  return resolve(id, &env, context);
}

void check_learner_id(std::string_view id) { resolve(id, nullptr, {}); }

std::vector<RegistryEntry> registered_learners() {
  return {
      {"conv-pricing", "convolution pricing, K = floor(T^(2/3)); two-bit"},
      {"conv-pricing:K=N", "convolution pricing with an explicit grid size N; two-bit"},
      {"dbs", "double binary search for deterministic valuations; two-bit"},
      {"fbep", "follow the best empirical price; full feedback"},
      {"fixed:p=P", "posts P every round"},
      {"gft-oracle", "fixed price maximizing expected GFT under the true environment"},
      {"uniform", "uniform random prices from the episode seed"},
      {"uniform:seed=S", "uniform random prices seeded by mix_seed(S, episode index)"},
  };
}

}  // namespace ftl
