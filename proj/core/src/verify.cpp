#include "ftl/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include "json.hpp"

#include "ftl/environment.hpp"
#include "ftl/errors.hpp"
#include "ftl/harness.hpp"
#include "ftl/reward.hpp"

namespace ftl::verify {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Runs `body`, stamps its runtime and folds the runtime budget into `pass`.
CheckResult timed(const std::string& name, double budget_ms,
                  const std::function<CheckResult()>& body) {
  const auto start = Clock::now();
  CheckResult result = body();
  result.check = name;
  result.runtime_ms = elapsed_ms(start);
  if (result.runtime_ms > budget_ms) {
    result.pass = false;
    result.detail += " [over runtime budget " + fmt(budget_ms) + " ms]";
  }
  return result;
}

// Independent reference for the reward, kept apart from ftl::fgft.
double tent(double p, double s, double b) {
  const double left = p - s > 0.0 ? p - s : 0.0;
  const double right = b - p > 0.0 ? b - p : 0.0;
  return left < right ? left : right;
}

// Random weights summing to one.
std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = 0.05 + rng.uniform();
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

// Generic doubles mixed with grid points k/1000 and the endpoints 0 and 1.
double random_value(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.1) return 0.0;
  if (u < 0.2) return 1.0;
  if (u < 0.6) return static_cast<double>(rng.next() % 1001) / 1000.0;
  return rng.uniform();
}

std::vector<double> distinct_values(Rng& rng, std::size_t n) {
  std::vector<double> values;
  while (values.size() < n) {
    const double v = random_value(rng);
    if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  }
  return values;
}

FiniteMarginal random_marginal(Rng& rng, std::size_t max_atoms) {
  const std::size_t n = 1 + rng.next() % max_atoms;
  const auto values = distinct_values(rng, n);
  const auto weights = random_weights(rng, n);
  std::vector<MarginalAtom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({values[i], weights[i]});
  return FiniteMarginal(std::move(atoms));
}

FiniteJointDistribution random_joint(Rng& rng, std::size_t max_atoms) {
  const std::size_t n = 1 + rng.next() % max_atoms;
  std::vector<ValuationPair> pairs;
  while (pairs.size() < n) {
    ValuationPair v{random_value(rng), random_value(rng)};
    if (std::find(pairs.begin(), pairs.end(), v) == pairs.end()) pairs.push_back(v);
  }
  const auto weights = random_weights(rng, n);
  std::vector<JointAtom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({pairs[i], weights[i]});
  return FiniteJointDistribution(std::move(atoms));
}

// Convolution identity on a 50^3 grid with M = 10^4.
std::vector<CheckResult> convolution_lemma(const Options&) {
  return {timed("convolution-lemma", 5000.0, [] {
    constexpr int kGrid = 50;
    constexpr std::size_t kM = 10000;
    double worst = 0.0;
    for (int i = 0; i < kGrid; ++i) {
      const double p = i / double(kGrid - 1);
      for (int j = 0; j < kGrid; ++j) {
        const double s = j / double(kGrid - 1);
        for (int k = 0; k < kGrid; ++k) {
          const double b = k / double(kGrid - 1);
          worst = std::max(worst,
                           std::abs(fgft_convolution_approx(p, {s, b}, kM) - tent(p, s, b)));
        }
      }
    }
    return CheckResult{"", worst <= 1e-4, worst, 1e-4, 0.0,
                       "max |riemann(M=1e4) - fgft| over 50^3 grid"};
  })};
}

// Sandwich: 0 <= (1/K) sum F(q_{k-i}) G(q_{k+i}) - E fgft(q_k) <= 1/K.
std::vector<CheckResult> sandwich(const Options&) {
  std::vector<CheckResult> out;
  constexpr double kTol = 1e-10;
  for (bool keep_g_at_one : {true, false}) {
    const std::string name =
        std::string("sandwich") + (keep_g_at_one ? "" : " (G(1) truncated to 0)");
    out.push_back(timed(name, 30000.0, [&] {
      Rng rng(2024);
      double worst = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        const auto seller = random_marginal(rng, 5);
        const auto buyer = random_marginal(rng, 5);
        const auto product = FiniteJointDistribution::product(seller, buyer);
        for (std::size_t grid : {10u, 100u, 1000u}) {
          const auto kd = static_cast<double>(grid);
          // F(q_j) for j in [1, K] and G(q_j) for j in [1, K]; both vanish
          // outside (F for j <= 0, G for j > K).
          std::vector<double> cdf(grid + 1, 0.0);
          std::vector<double> co_cdf(grid + 1, 0.0);
          for (std::size_t j = 1; j <= grid; ++j) {
            const double q = static_cast<double>(j) / kd;
            cdf[j] = seller.cdf(q);
            co_cdf[j] = (j == grid && !keep_g_at_one) ? 0.0 : buyer.survival(q);
          }
          for (std::size_t k = 1; k <= grid; ++k) {
            double sum = 0.0;
            const std::size_t i_max = std::min(k - 1, grid - k);
            for (std::size_t i = 0; i <= i_max; ++i) sum += cdf[k - i] * co_cdf[k + i];
            const double diff = sum / kd - expected_fgft(product, static_cast<double>(k) / kd);
            worst = std::max({worst, -diff, diff - 1.0 / kd});
          }
        }
      }
      return CheckResult{"", worst <= kTol, worst, kTol, 0.0,
                         "largest excursion outside [0, 1/K], K in {10,100,1000}, 100 pairs"};
    }));
  }
  return out;
}

// Indistinguishable pair.
std::vector<CheckResult> indistinguishability(const Options& options) {
  std::vector<CheckResult> out;
  IndistinguishabilityReport report;
  out.push_back(timed("indistinguishability: feedback tables", 60000.0, [&] {
    report = indistinguishability_check({"conv-pricing", "dbs"}, 1000, 20);
    return CheckResult{"", report.tables_equal, report.max_table_difference, 0.0, 0.0,
                       "max |P_mu - P_nu| over " + std::to_string(report.regions) +
                           " regions (exact)"};
  }));
  out.push_back(timed("indistinguishability: coupled trajectories", 60000.0, [&] {
    return CheckResult{"", report.coupling_mismatches.empty(),
                       static_cast<double>(report.coupling_mismatches.size()), 0.0, 0.0,
                       "learners whose coupled price sequences differ on mu vs nu"};
  }));
  out.push_back(timed("indistinguishability: fixed prices", 60000.0, [&] {
    return CheckResult{"", report.min_fixed_price_regret_rate >= 1.0 / 48.0,
                       report.min_fixed_price_regret_rate, 1.0 / 48.0, 0.0,
                       "min over fixed prices of max(R_mu, R_nu)/T, must be >= 1/48"};
  }));
  out.push_back(timed("indistinguishability: conv-pricing T/48", 60000.0, [&] {
    constexpr std::size_t kT = 10000;
    const std::size_t horizon[] = {kT};
    double worst_mean = -1.0;
    double worst_se = 0.0;
    for (const auto& env : {EnvironmentSpec::lb_mu(), EnvironmentSpec::lb_nu()}) {
      RunConfig config;
      config.env = env;
      config.learner = "conv-pricing";
      config.n_episodes = 50;
      config.base_seed = 3;
      config.threads = options.threads;
      const auto curve = run_monte_carlo(config, horizon);
      if (curve.mean[0] > worst_mean) {
        worst_mean = curve.mean[0];
        worst_se = curve.standard_error[0];
      }
    }
    const double threshold = kT / 48.0 - 3.0 * worst_se;
    return CheckResult{"", worst_mean >= threshold, worst_mean, threshold, 0.0,
                       "max over {mu,nu} of mean regret at T=1e4, must be >= T/48 - 3 se"};
  }));
  return out;
}

// GFT-optimal fixed price is FGFT-suboptimal.
std::vector<CheckResult> gft_trap(const Options&) {
  return {timed("gft-trap", 1000.0, [] {
    RunConfig config;
    config.env = EnvironmentSpec::gft_trap(0.1);
    config.learner = "gft-oracle";
    config.horizon = 1000;
    const double regret = pseudo_regret(config, run_episode(config, 0));
    const double expected = (0.25 - 0.05) * 1000.0;
    const double error = std::abs(regret - expected);
    return CheckResult{"", error <= 1e-8, regret, 1e-8,
                       0.0, "gft-oracle regret on gft-trap:h=0.1, T=1e3, expected 200"};
  })};
}

std::size_t ceil_log2(std::size_t t) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < t) ++n;
  return n;
}

// Double binary search regret bound on a 65 x 65 valuation grid.
std::vector<CheckResult> dbs_bound(const Options& options) {
  std::vector<CheckResult> out;
  for (std::size_t horizon : {100u, 1000u, 10000u, 100000u}) {
    out.push_back(timed("dbs-bound T=" + std::to_string(horizon), 120000.0, [&] {
      constexpr std::size_t kGrid = 65;
      const double bound = 1.0 + 2.0 * static_cast<double>(ceil_log2(horizon));
      std::vector<double> worst(kGrid * kGrid, 0.0);
      parallel_for(kGrid * kGrid, options.threads, [&](std::size_t idx) {
        RunConfig config;
        config.env = EnvironmentSpec::deterministic(static_cast<double>(idx / kGrid) / 64.0,
                                                    static_cast<double>(idx % kGrid) / 64.0);
        config.learner = "dbs";
        config.horizon = horizon;
        worst[idx] = pseudo_regret(config, run_episode(config, 0));
      });
      const double max_regret = *std::max_element(worst.begin(), worst.end());
      return CheckResult{"", max_regret <= bound, max_regret, bound, 0.0,
                         "max dbs regret over 65x65 (s,b) grid, must be <= 1 + 2 ceil(log2 T)"};
    }));
  }
  return out;
}

// Worst-case dbs regret grows like log T.
std::vector<CheckResult> dbs_log_growth(const Options& options) {
  std::vector<CheckResult> out;
  std::vector<double> maxima;
  out.push_back(timed("dbs-log-growth: monotone", 120000.0, [&] {
    for (int e = 8; e <= 16; ++e) {
      maxima.push_back(adversarial_deterministic_sweep("dbs", std::size_t{1} << e, 4097, 0.25,
                                                       1.0, options.threads)
                           .max_regret);
    }
    double worst_drop = 0.0;
    std::string trace;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
      if (i > 0) worst_drop = std::max(worst_drop, maxima[i - 1] - maxima[i]);
      trace += (i ? "," : "") + fmt(maxima[i]);
    }
    return CheckResult{"", worst_drop <= 0.0, worst_drop, 0.0, 0.0,
                       "largest decrease of sweep max across T=2^8..2^16: " + trace};
  }));
  out.push_back(timed("dbs-log-growth: per doubling", 1000.0, [&] {
    double worst_step = 0.0;
    for (std::size_t i = 1; i < maxima.size(); ++i) {
      worst_step = std::max(worst_step, maxima[i] - maxima[i - 1]);
    }
    return CheckResult{"", worst_step <= 2.5, worst_step, 2.5, 0.0,
                       "largest increase of sweep max per doubling of T"};
  }));
  return out;
}

struct RateCase {
  EnvironmentSpec env;
  std::string name;
};

// Shared body of the two rate suites.
void rate_checks(std::vector<CheckResult>& out, const std::string& suite,
                 const std::string& learner, const std::vector<RateCase>& cases,
                 const std::vector<std::size_t>& horizons, double slope_lo, double slope_hi,
                 const std::function<double(double)>& rate, bool allow_non_increasing,
                 const Options& options) {
  for (const auto& c : cases) {
    RegretCurve curve;
    out.push_back(timed(suite + ": slope " + c.name, 600000.0, [&] {
      RunConfig config;
      config.env = c.env;
      config.learner = learner;
      config.n_episodes = 50;
      config.base_seed = 11;
      config.threads = options.threads;
      curve = run_monte_carlo(config, horizons);
      const auto fit = fit_exponent(curve);
      std::string means;
      for (std::size_t i = 0; i < curve.mean.size(); ++i) means += (i ? "," : "") + fmt(curve.mean[i]);
      return CheckResult{"", fit.slope >= slope_lo && fit.slope <= slope_hi, fit.slope,
                         slope_hi, 0.0,
                         "fitted slope, band [" + fmt(slope_lo) + ", " + fmt(slope_hi) +
                             "]; means " + means};
    }));
    out.push_back(timed(suite + ": normalized " + c.name, 1000.0, [&] {
      std::vector<double> normalized;
      for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
        normalized.push_back(curve.mean[i] / rate(static_cast<double>(curve.horizons[i])));
      }
      const double ratio = *std::max_element(normalized.begin(), normalized.end()) /
                           *std::min_element(normalized.begin(), normalized.end());
      const bool non_increasing =
          std::is_sorted(normalized.rbegin(), normalized.rend());
      std::string trace;
      for (std::size_t i = 0; i < normalized.size(); ++i) trace += (i ? "," : "") + fmt(normalized[i]);
      const bool ok = ratio <= 3.0 || (allow_non_increasing && non_increasing);
      return CheckResult{"", ok, ratio, 3.0, 0.0,
                         std::string("max/min of regret/rate") +
                             (allow_non_increasing ? " (or non-increasing)" : "") + ": " + trace};
    }));
  }
}

// Convolution pricing rate on independent environments.
std::vector<CheckResult> conv_pricing_rate(const Options& options) {
  std::vector<RateCase> cases{{EnvironmentSpec::epsilon_family(0.2), "eps-family:eps=0.2"}};
  Rng rng(77);
  for (int i = 0; i < 2; ++i) {
    auto env = EnvironmentSpec::independent(random_marginal(rng, 4), random_marginal(rng, 4));
    cases.push_back({env, "random-independent-" + std::to_string(i)});
  }
  std::vector<CheckResult> out;
  rate_checks(
      out, "conv-pricing-rate", "conv-pricing", cases, {1000, 10000, 100000, 1000000}, 0.50, 0.80,
      [](double t) { return std::pow(t, 2.0 / 3.0) * std::sqrt(std::log(t)); }, true, options);
  return out;
}

// Follow the best empirical price under full feedback.
std::vector<CheckResult> fbep_rate(const Options& options) {
  std::vector<RateCase> cases{{EnvironmentSpec::lb_mu(), "lb-mu"},
                              {EnvironmentSpec::lb_nu(), "lb-nu"}};
  Rng rng(99);
  for (int i = 0; i < 2; ++i) {
    cases.push_back({EnvironmentSpec::joint(random_joint(rng, 6)), "random-joint-" + std::to_string(i)});
  }
  std::vector<CheckResult> out;
  rate_checks(
      out, "fbep-rate", "fbep", cases, {1000, 10000, 100000}, -1e300, 0.62,
      [](double t) { return std::sqrt(t); }, false, options);
  out.push_back(timed("fbep-rate: deterministic", 1000.0, [] {
    RunConfig config;
    config.env = EnvironmentSpec::deterministic(0.2, 0.8);
    config.learner = "fbep";
    config.horizon = 100000;
    const double regret = pseudo_regret(config, run_episode(config, 0));
    return CheckResult{"", regret <= 0.5, regret, 0.5, 0.0,
                       "fbep total regret on det:s=0.2,b=0.8, T=1e5, must be <= 1/2"};
  }));
  return out;
}

// Closed forms of the expected FGFT for seller mass (1+e)/2 at 0 and
// (1-e)/2 at 1/4 with the buyer at 1; e carries the sign.
double closed_form(double e, double p) {
  if (p < 0.25) return (1.0 + e) / 2.0 * p;
  if (p < 0.5) return (1.0 + e) / 8.0 + (p - 0.25);
  if (p < 0.625) return (1.0 + e) / 8.0 + 0.25 + e * (0.5 - p);
  return (1.0 + e) / 8.0 + 0.25 - e / 8.0 + (0.625 - p);
}

// Two-point lower-bound family.
std::vector<CheckResult> eps_family(const Options&) {
  std::vector<CheckResult> out;
  out.push_back(timed("eps-family: closed forms", 5000.0, [] {
    double worst = 0.0;
    for (double eps : {0.0, 0.1, 0.25}) {
      for (double sign : {1.0, -1.0}) {
        const auto joint = EnvironmentSpec::epsilon_family(sign * eps).joint();
        for (int i = 0; i <= 1000; ++i) {
          const double p = i / 1000.0;
          worst = std::max(worst, std::abs(expected_fgft(joint, p) - closed_form(sign * eps, p)));
        }
      }
    }
    return CheckResult{"", worst <= 1e-12, worst, 1e-12, 0.0,
                       "max |oracle - closed form| on 1e-3 grid, eps in {0,0.1,0.25}, both signs"};
  }));
  out.push_back(timed("eps-family: argmax", 5000.0, [] {
    double worst = 0.0;
    std::string detail;
    for (double eps : {0.0, 0.1, 0.25}) {
      const auto plus = best_fixed_price_fgft(EnvironmentSpec::epsilon_family(eps).joint());
      const auto minus_joint = EnvironmentSpec::epsilon_family(-eps).joint();
      const auto minus = best_fixed_price_fgft(minus_joint);
      worst = std::max({worst, std::abs(plus.price - 0.5), std::abs(plus.value - (3.0 + eps) / 8.0),
                        std::abs(minus.value - 0.375)});
      if (eps > 0.0) {
        worst = std::max(worst, std::abs(minus.price - 0.625));
      } else {
        // eps = 0: every p in [1/2, 5/8] is optimal and 1/2 is returned.
        worst = std::max({worst, std::abs(expected_fgft(minus_joint, 0.625) - minus.value),
                          std::abs(minus.price - 0.5)});
      }
      detail += "eps=" + fmt(eps) + ": +(" + fmt(plus.price) + "," + fmt(plus.value) + ") -(" +
                fmt(minus.price) + "," + fmt(minus.value) + ") ";
    }
    return CheckResult{"", worst <= 1e-12, worst, 1e-12, 0.0, detail};
  }));
  out.push_back(timed("eps-family: eps/16 gaps", 5000.0, [] {
    double worst = 0.0;  // largest shortfall below eps/16
    for (double eps : {0.0, 0.1, 0.25}) {
      const auto plus = EnvironmentSpec::epsilon_family(eps).joint();
      const auto minus = EnvironmentSpec::epsilon_family(-eps).joint();
      const double plus_best = best_fixed_price_fgft(plus).value;
      const double minus_best = best_fixed_price_fgft(minus).value;
      for (int i = 0; i <= 1000; ++i) {
        const double p = i / 1000.0;
        if (p >= 0.25 && p < 0.5625) {
          worst = std::max(worst, eps / 16.0 - (minus_best - expected_fgft(minus, p)));
        }
        if (p > 0.5625) {
          worst = std::max(worst, eps / 16.0 - (plus_best - expected_fgft(plus, p)));
        }
      }
    }
    return CheckResult{"", worst <= 1e-12, worst, 1e-12, 0.0,
                       "largest shortfall of instantaneous regret below eps/16 on I+ / I-"};
  }));
  return out;
}

// Exact oracle vs a 1e-4 price grid.
std::vector<CheckResult> oracle_equivalence(const Options&) {
  return {timed("oracle-equivalence", 30000.0, [] {
    Rng rng(5150);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto dist = random_joint(rng, 8);
      double brute = 0.0;
      for (int i = 0; i <= 10000; ++i) {
        const double p = i / 10000.0;
        double value = 0.0;
        for (const auto& a : dist.atoms()) value += a.weight * tent(p, a.pair.seller, a.pair.buyer);
        brute = std::max(brute, value);
      }
      const auto exact = best_fixed_price_fgft(dist);
      worst = std::max(worst, std::abs(exact.value - brute));
      if (brute > exact.value + 1e-12) worst = std::max(worst, 1.0);
    }
    return CheckResult{"", worst <= 1e-4, worst, 1e-4, 0.0,
                       "max |exact - grid brute force| over 100 random joints"};
  })};
}

using Suite = std::vector<CheckResult> (*)(const Options&);

const std::vector<std::pair<std::string, Suite>>& registry() {
  static const std::vector<std::pair<std::string, Suite>> suites{
      {"convolution-lemma", convolution_lemma},
      {"sandwich", sandwich},
      {"indistinguishability", indistinguishability},
      {"gft-trap", gft_trap},
      {"dbs-bound", dbs_bound},
      {"dbs-log-growth", dbs_log_growth},
      {"conv-pricing-rate", conv_pricing_rate},
      {"fbep-rate", fbep_rate},
      {"eps-family", eps_family},
      {"oracle-equivalence", oracle_equivalence},
  };
  return suites;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, suite] : registry()) names.push_back(name);
  return names;
}

std::vector<CheckResult> run_suite(std::string_view name, const Options& options) {
  if (name == "all") {
    std::vector<CheckResult> all;
    for (const auto& [suite_name, suite] : registry()) {
      auto results = suite(options);
      all.insert(all.end(), results.begin(), results.end());
    }
    return all;
  }
  for (const auto& [suite_name, suite] : registry()) {
    if (suite_name == name) return suite(options);
  }
  throw IdResolutionError("suite", std::string(name));
}

std::string report_json(std::span<const CheckResult> results) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : results) {
    doc.push_back({{"check", r.check},
                   {"pass", r.pass},
                   {"measured", r.measured},
                   {"tolerance", r.tolerance},
                   {"runtime_ms", r.runtime_ms}});
  }
  return doc.dump(2);
}

}  // namespace ftl::verify
