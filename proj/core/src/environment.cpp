#include "ftl/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include "json.hpp"

#include "ftl/errors.hpp"

namespace ftl {

std::string_view to_string(FeedbackModel model) {
  return model == FeedbackModel::TwoBit ? "two-bit" : "full";
}

FeedbackModel parse_feedback_model(std::string_view text) {
  if (text == "two-bit") return FeedbackModel::TwoBit;
  if (text == "full") return FeedbackModel::Full;
  throw ConfigError("unknown feedback model '" + std::string(text) + "'");
}

TwoBitFeedback two_bit_feedback(Price p, ValuationPair v) {
  return {v.seller <= p, p <= v.buyer};
}

Feedback render_feedback(FeedbackModel model, Price p, ValuationPair v) {
  if (model == FeedbackModel::TwoBit) return two_bit_feedback(p, v);
  return FullObservation{v};
}

namespace {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

FiniteJointDistribution point_mass(double seller, double buyer) {
  return FiniteJointDistribution({{{seller, buyer}, 1.0}});
}

FiniteJointDistribution thirds(ValuationPair a, ValuationPair b, ValuationPair c) {
  constexpr double third = 1.0 / 3.0;
  return FiniteJointDistribution({{a, third}, {b, third}, {c, third}});
}

// Drops zero-weight atoms (eps = +-1 collapses to a point mass).
FiniteJointDistribution two_point(ValuationPair a, double wa, ValuationPair b, double wb) {
  std::vector<JointAtom> atoms;
  if (wa > 0.0) atoms.push_back({a, wa});
  if (wb > 0.0) atoms.push_back({b, wb});
  return FiniteJointDistribution(std::move(atoms));
}

}  // namespace

EnvironmentSpec::EnvironmentSpec(Variant variant, FiniteJointDistribution joint)
    : variant_(std::move(variant)), joint_(std::move(joint)) {
  cumulative_.reserve(joint_.size());
  double running = 0.0;
  for (const auto& atom : joint_.atoms()) {
    running += atom.weight;
    cumulative_.push_back(running);
  }
}

EnvironmentSpec EnvironmentSpec::deterministic(double seller, double buyer) {
  require(seller >= 0.0 && seller <= 1.0 && buyer >= 0.0 && buyer <= 1.0,
          "det: valuations must lie in [0,1]");
  return {env::Deterministic{seller, buyer}, point_mass(seller, buyer)};
}

EnvironmentSpec EnvironmentSpec::independent(FiniteMarginal seller, FiniteMarginal buyer) {
  auto joint = FiniteJointDistribution::product(seller, buyer);
  return {env::IndependentFinite{std::move(seller), std::move(buyer)}, std::move(joint)};
}

EnvironmentSpec EnvironmentSpec::joint(FiniteJointDistribution dist) {
  auto copy = dist;
  return {env::JointFinite{std::move(dist)}, std::move(copy)};
}

EnvironmentSpec EnvironmentSpec::lb_mu() {
  return {env::LbMu{}, thirds({0.0, 0.625}, {0.375, 0.375}, {0.625, 1.0})};
}

EnvironmentSpec EnvironmentSpec::lb_nu() {
  return {env::LbNu{}, thirds({0.0, 0.375}, {0.375, 1.0}, {0.625, 0.625})};
}

EnvironmentSpec EnvironmentSpec::gft_trap(double h) {
  require(h > 0.0 && h < 0.5, "gft-trap: h must lie in (0, 1/2)");
  return {env::GftTrap{h}, FiniteJointDistribution({{{0.0, 1.0}, 0.5}, {{1.0 - h, 1.0}, 0.5}})};
}

EnvironmentSpec EnvironmentSpec::epsilon_family(double epsilon) {
  require(epsilon >= -1.0 && epsilon <= 1.0, "eps-family: eps must lie in [-1, 1]");
  return {env::EpsilonFamily{epsilon},
          two_point({0.0, 1.0}, (1.0 + epsilon) / 2.0, {0.25, 1.0}, (1.0 - epsilon) / 2.0)};
}

std::string EnvironmentSpec::id() const {
  if (label_) return *label_;
  struct Namer {
    std::string operator()(const env::Deterministic& d) const {
      return "det:s=" + format_number(d.seller) + ",b=" + format_number(d.buyer);
    }
    std::string operator()(const env::IndependentFinite& e) const {
      return "independent:n=" + std::to_string(e.seller.size()) + "x" +
             std::to_string(e.buyer.size());
    }
    std::string operator()(const env::JointFinite& e) const {
      return "joint:n=" + std::to_string(e.dist.size());
    }
    std::string operator()(const env::LbMu&) const { return "lb-mu"; }
    std::string operator()(const env::LbNu&) const { return "lb-nu"; }
    std::string operator()(const env::GftTrap& e) const {
      return "gft-trap:h=" + format_number(e.h);
    }
    std::string operator()(const env::EpsilonFamily& e) const {
      return "eps-family:eps=" + format_number(e.epsilon);
    }
  };
  return std::visit(Namer{}, variant_);
}

EnvironmentSpec& EnvironmentSpec::with_label(std::string label) {
  label_ = std::move(label);
  return *this;
}

bool EnvironmentSpec::independent_by_construction() const {
  return !std::holds_alternative<env::JointFinite>(variant_) &&
         !std::holds_alternative<env::LbMu>(variant_) &&
         !std::holds_alternative<env::LbNu>(variant_);
}

ValuationPair EnvironmentSpec::at_quantile(double u) const {
  const auto atoms = joint_.atoms();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return atoms.back().pair;
  return atoms[static_cast<std::size_t>(it - cumulative_.begin())].pair;
}

FiniteJointDistribution as_joint(const EnvironmentSpec& env) { return env.joint(); }

ValuationPair sample_valuations(const EnvironmentSpec& env, Rng& rng) {
  return env.at_quantile(rng.uniform());
}

FeedbackProbabilities feedback_distribution(const EnvironmentSpec& env, Price p) {
  FeedbackProbabilities probs{};
  for (const auto& atom : env.joint().atoms()) {
    probs[outcome_index(two_bit_feedback(p, atom.pair))] += atom.weight;
  }
  return probs;
}

std::vector<double> support_coordinates(const EnvironmentSpec& env) {
  std::vector<double> coords{0.0, 1.0};
  for (const auto& atom : env.joint().atoms()) {
    coords.push_back(atom.pair.seller);
    coords.push_back(atom.pair.buyer);
  }
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

FeedbackDistributionTable feedback_table(const EnvironmentSpec& env,
                                         std::span<const double> boundaries) {
  FeedbackDistributionTable table;
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const double point = boundaries[i];
    table.regions.push_back({point, point, point, feedback_distribution(env, point)});
    if (i + 1 < boundaries.size()) {
      const double mid = 0.5 * (point + boundaries[i + 1]);
      table.regions.push_back({point, boundaries[i + 1], mid, feedback_distribution(env, mid)});
    }
  }
  return table;
}

FeedbackDistributionTable feedback_table(const EnvironmentSpec& env) {
  const auto coords = support_coordinates(env);
  return feedback_table(env, coords);
}

namespace {

std::map<std::string, double, std::less<>> parse_params(std::string_view id,
                                                        std::string_view text) {
  std::map<std::string, double, std::less<>> params;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ConfigError("malformed parameter '" + std::string(item) + "' in id '" +
                        std::string(id) + "'");
    }
    const auto key = item.substr(0, eq);
    const auto value_text = item.substr(eq + 1);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc{} || ptr != value_text.data() + value_text.size()) {
      throw ConfigError("non-numeric parameter '" + std::string(item) + "' in id '" +
                        std::string(id) + "'");
    }
    params.emplace(std::string(key), value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return params;
}

double take(const std::map<std::string, double, std::less<>>& params, std::string_view key,
            std::string_view id) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw ConfigError("id '" + std::string(id) + "' is missing parameter '" + std::string(key) +
                      "'");
  }
  return it->second;
}

void expect_keys(const std::map<std::string, double, std::less<>>& params,
                 std::initializer_list<std::string_view> keys, std::string_view id) {
  for (const auto& [key, value] : params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("id '" + std::string(id) + "' has unknown parameter '" + key + "'");
    }
  }
}

}  // namespace

EnvironmentSpec parse_environment(std::string_view id) {
  const auto colon = id.find(':');
  const auto name = id.substr(0, colon);
  const auto params = colon == std::string_view::npos
                          ? std::map<std::string, double, std::less<>>{}
                          : parse_params(id, id.substr(colon + 1));
  if (name == "lb-mu" || name == "lb-nu") {
    expect_keys(params, {}, id);
    return name == "lb-mu" ? EnvironmentSpec::lb_mu() : EnvironmentSpec::lb_nu();
  }
  if (name == "gft-trap") {
    expect_keys(params, {"h"}, id);
    return EnvironmentSpec::gft_trap(take(params, "h", id));
  }
  if (name == "eps-family") {
    expect_keys(params, {"eps"}, id);
    return EnvironmentSpec::epsilon_family(take(params, "eps", id));
  }
  if (name == "det") {
    expect_keys(params, {"s", "b"}, id);
    return EnvironmentSpec::deterministic(take(params, "s", id), take(params, "b", id));
  }
  throw IdResolutionError("environment", std::string(id));
}

namespace {

using nlohmann::json;

std::vector<JointAtom> joint_atoms(const json& list) {
  if (!list.is_array()) throw ConfigError("joint 'atoms' must be an array of [s, b, w]");
  std::vector<JointAtom> atoms;
  for (const auto& row : list) {
    if (!row.is_array() || row.size() != 3) throw ConfigError("joint atom must be [s, b, w]");
    atoms.push_back({{row[0].get<double>(), row[1].get<double>()}, row[2].get<double>()});
  }
  return atoms;
}

std::vector<MarginalAtom> marginal_atoms(const json& list, const char* side) {
  if (!list.is_array()) {
    throw ConfigError(std::string("independent '") + side + "' must be an array of [v, w]");
  }
  std::vector<MarginalAtom> atoms;
  for (const auto& row : list) {
    if (!row.is_array() || row.size() != 2) throw ConfigError("marginal atom must be [v, w]");
    atoms.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return atoms;
}

}  // namespace

EnvironmentSpec parse_environment_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("environment JSON: ") + e.what());
  }
  if (doc.is_string()) return parse_environment(doc.get<std::string>());
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw ConfigError("environment object needs a string 'type'");
  }
  const auto type = doc["type"].get<std::string>();
  try {
    std::optional<EnvironmentSpec> spec;
    if (type == "joint") {
      spec = EnvironmentSpec::joint(FiniteJointDistribution(joint_atoms(doc.at("atoms"))));
    } else if (type == "independent") {
      spec = EnvironmentSpec::independent(FiniteMarginal(marginal_atoms(doc.at("seller"), "seller")),
                                          FiniteMarginal(marginal_atoms(doc.at("buyer"), "buyer")));
    } else {
      throw IdResolutionError("environment type", type);
    }
    if (doc.contains("name")) spec->with_label(doc["name"].get<std::string>());
    return *spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("environment JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("environment JSON: ") + e.what());
  }
}

std::vector<RegistryEntry> registered_environments() {
  return {
      {"lb-mu", "indistinguishable pair, first member (optimum 5/16)"},
      {"lb-nu", "indistinguishable pair, second member (optimum 11/16)"},
      {"gft-trap:h=H", "seller 0 or 1-H w.p. 1/2, buyer 1; H in (0, 1/2)"},
      {"eps-family:eps=E", "seller 0 w.p. (1+E)/2 else 1/4, buyer 1; E in [-1, 1]"},
      {"det:s=S,b=B", "deterministic valuations (S, B)"},
      {"{\"type\":\"joint\",\"atoms\":[[s,b,w],...]}", "inline finite joint distribution"},
      {"{\"type\":\"independent\",\"seller\":[[v,w],...],\"buyer\":[[v,w],...]}",
       "inline independent finite marginals"},
  };
}

}  // namespace ftl
