#include "ftl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ftl/learner.hpp"
#include "ftl/reward.hpp"

namespace ftl {

std::uint64_t episode_seed(std::uint64_t base_seed, std::uint64_t index) {
  return mix_seed(base_seed, index);
}

namespace {

FeedbackModel effective_feedback(const RunConfig& config, const Learner& learner) {
  return config.feedback.value_or(learner.native_feedback().value_or(FeedbackModel::TwoBit));
}

}  // namespace

Trajectory run_episode(const RunConfig& config, std::size_t episode_index) {
  const std::uint64_t seed = episode_seed(config.base_seed, episode_index);
  auto learner = make_learner(config.learner, config.env, {seed, episode_index});
  const FeedbackModel model = effective_feedback(config, *learner);
  learner->init(config.horizon, model, config.strict_feedback);

  Rng valuations(seed);
  Trajectory trajectory;
  trajectory.prices.reserve(config.horizon);
  trajectory.rewards.reserve(config.horizon);
  for (std::size_t t = 0; t < config.horizon; ++t) {
    const Price p = learner->propose();
    const ValuationPair v = sample_valuations(config.env, valuations);
    trajectory.prices.push_back(p);
    trajectory.rewards.push_back(fgft(p, v));
    learner->update(render_feedback(model, p, v));
  }
  return trajectory;
}

double pseudo_regret(const FiniteJointDistribution& dist, std::span<const Price> prices) {
  const double best = best_fixed_price_fgft(dist).value;
  double total = 0.0;
  std::optional<Price> last;
  double gap = 0.0;
  for (Price p : prices) {
    if (!last || *last != p) {
      gap = best - expected_fgft(dist, p);
      last = p;
    }
    total += gap;
  }
  return total;
}

double pseudo_regret(const RunConfig& config, const Trajectory& trajectory) {
  return pseudo_regret(config.env.joint(), trajectory.prices);
}

RegretCurve run_monte_carlo(const RunConfig& config, std::span<const std::size_t> horizons) {
  if (config.n_episodes == 0) throw std::invalid_argument("n_episodes must be at least 1");
  RegretCurve curve;
  curve.n_episodes = config.n_episodes;
  for (std::size_t horizon : horizons) {
    RunConfig run = config;
    run.horizon = horizon;
    std::vector<double> regrets(config.n_episodes);
    parallel_for(config.n_episodes, config.threads, [&](std::size_t e) {
      regrets[e] = pseudo_regret(run, run_episode(run, e));
    });
    double mean = 0.0;
    double squares = 0.0;
    for (std::size_t i = 0; i < regrets.size(); ++i) {
      const double delta = regrets[i] - mean;
      mean += delta / static_cast<double>(i + 1);
      squares += delta * (regrets[i] - mean);
    }
    const auto n = static_cast<double>(regrets.size());
    const double se = regrets.size() > 1 ? std::sqrt(squares / (n - 1.0) / n) : 0.0;
    curve.horizons.push_back(horizon);
    curve.mean.push_back(mean);
    curve.standard_error.push_back(se);
  }
  return curve;
}

ExponentFit fit_exponent(std::span<const std::size_t> horizons, std::span<const double> means) {
  if (horizons.size() != means.size()) throw std::invalid_argument("fit: length mismatch");
  if (horizons.size() < 3) throw std::invalid_argument("fit: needs at least 3 horizons");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(means[i] > 0.0)) throw std::invalid_argument("fit: means must be strictly positive");
    xs.push_back(std::log(static_cast<double>(horizons[i])));
    ys.push_back(std::log(means[i]));
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit: horizons must not all be equal");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double residual = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    residual += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - residual / syy : 1.0;
  return fit;
}

ExponentFit fit_exponent(const RegretCurve& curve) {
  return fit_exponent(curve.horizons, curve.mean);
}

SweepReport adversarial_deterministic_sweep(const std::string& learner, std::size_t horizon,
                                            std::size_t grid_points, double s_max, double buyer,
                                            std::size_t threads) {
  if (grid_points == 0) throw std::invalid_argument("sweep grid needs at least one point");
  if (!(s_max >= 0.0 && s_max <= 1.0)) throw std::invalid_argument("sweep s_max must be in [0,1]");
  check_learner_id(learner);
  SweepReport report;
  report.learner = learner;
  report.horizon = horizon;
  report.buyer = buyer;
  report.seller_grid.resize(grid_points);
  report.regret.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    report.seller_grid[i] =
        grid_points == 1 ? 0.0
                         : s_max * static_cast<double>(i) / static_cast<double>(grid_points - 1);
  }
  parallel_for(grid_points, threads, [&](std::size_t i) {
    RunConfig config;
    config.env = EnvironmentSpec::deterministic(report.seller_grid[i], buyer);
    config.learner = learner;
    config.horizon = horizon;
    report.regret[i] = pseudo_regret(config, run_episode(config, 0));
  });
  report.max_regret = report.regret[0];
  report.argmax_seller = report.seller_grid[0];
  for (std::size_t i = 1; i < grid_points; ++i) {
    if (report.regret[i] > report.max_regret) {
      report.max_regret = report.regret[i];
      report.argmax_seller = report.seller_grid[i];
    }
  }
  return report;
}

std::vector<Price> run_feedback_coupled(const EnvironmentSpec& env, const std::string& learner,
                                        std::size_t horizon, std::uint64_t seed) {
  auto agent = make_learner(learner, env, {seed, 0});
  agent->init(horizon, FeedbackModel::TwoBit, false);
  Rng rng(seed);
  std::vector<Price> prices;
  prices.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const Price p = agent->propose();
    const auto probs = feedback_distribution(env, p);
    const double u = rng.uniform();
    std::size_t outcome = 0;
    double cumulative = probs[0];
    while (outcome + 1 < probs.size() && u >= cumulative) cumulative += probs[++outcome];
    prices.push_back(p);
    agent->update(outcome_at(outcome));
  }
  return prices;
}

IndistinguishabilityReport indistinguishability_check(const std::vector<std::string>& learners,
                                                      std::size_t horizon,
                                                      std::size_t coupled_seeds) {
  const auto mu = EnvironmentSpec::lb_mu();
  const auto nu = EnvironmentSpec::lb_nu();
  IndistinguishabilityReport report;

  auto coords = support_coordinates(mu);
  const auto nu_coords = support_coordinates(nu);
  coords.insert(coords.end(), nu_coords.begin(), nu_coords.end());
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  const auto mu_table = feedback_table(mu, coords);
  const auto nu_table = feedback_table(nu, coords);
  report.regions = mu_table.regions.size();
  for (std::size_t r = 0; r < mu_table.regions.size(); ++r) {
    for (std::size_t k = 0; k < 4; ++k) {
      report.max_table_difference =
          std::max(report.max_table_difference, std::abs(mu_table.regions[r].probabilities[k] -
                                                          nu_table.regions[r].probabilities[k]));
    }
  }
  report.tables_equal = report.max_table_difference == 0.0;

  for (const auto& learner : learners) {
    for (std::uint64_t seed = 0; seed < coupled_seeds; ++seed) {
      if (run_feedback_coupled(mu, learner, horizon, seed) !=
          run_feedback_coupled(nu, learner, horizon, seed)) {
        report.coupling_mismatches.push_back(learner);
        break;
      }
    }
  }

  const double mu_best = best_fixed_price_fgft(mu.joint()).value;
  const double nu_best = best_fixed_price_fgft(nu.joint()).value;
  double worst_case_min = 1.0;
  for (int i = 0; i <= 200; ++i) {
    const double p = i / 200.0;
    const double gap = std::max(mu_best - expected_fgft(mu.joint(), p),
                                nu_best - expected_fgft(nu.joint(), p));
    worst_case_min = std::min(worst_case_min, gap);
  }
  report.min_fixed_price_regret_rate = worst_case_min;
  report.pass = report.tables_equal && report.coupling_mismatches.empty() &&
                report.min_fixed_price_regret_rate >= 1.0 / 48.0;
  return report;
}

namespace {

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

std::string curve_csv_header() { return "algorithm,env,T,n_episodes,mean_regret,stderr,slope\n"; }

std::string curve_csv_rows(const std::string& algorithm, const std::string& env,
                           const RegretCurve& curve, bool with_slope) {
  std::string slope;
  if (with_slope) {
    try {
      slope = number(fit_exponent(curve).slope);
    } catch (const std::invalid_argument&) {
      // Too few horizons or a zero mean: leave the column empty.
    }
  }
  std::string out;
  for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
    out += csv_field(algorithm) + ',' + csv_field(env) + ',' + std::to_string(curve.horizons[i]) +
           ',' + std::to_string(curve.n_episodes) + ',' + number(curve.mean[i]) + ',' +
           number(curve.standard_error[i]) + ',' + slope + '\n';
  }
  return out;
}

std::string sweep_csv(const SweepReport& report) {
  std::string out = "learner,T,seller,buyer,regret\n";
  for (std::size_t i = 0; i < report.seller_grid.size(); ++i) {
    out += csv_field(report.learner) + ',' + std::to_string(report.horizon) + ',' +
           number(report.seller_grid[i]) + ',' + number(report.buyer) + ',' +
           number(report.regret[i]) + '\n';
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ftl
