#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftl/environment.hpp"
#include "ftl/types.hpp"

namespace ftl {

struct RunConfig {
  EnvironmentSpec env = EnvironmentSpec::lb_mu();
  std::string learner = "conv-pricing";
  std::size_t horizon = 1;
  std::size_t n_episodes = 1;
  std::uint64_t base_seed = 0;
  /// Feedback delivered to the learner; defaults to the learner's own model
  /// (two-bit for learners that ignore feedback).
  std::optional<FeedbackModel> feedback;
  bool strict_feedback = false;
  /// Worker cap for Monte Carlo runs; 0 means hardware concurrency.
  std::size_t threads = 1;
};

/// Seed of episode `index`: mix_seed(base_seed, index). The valuation stream
/// is Rng(episode_seed); learners needing randomness get their own stream.
std::uint64_t episode_seed(std::uint64_t base_seed, std::uint64_t index);

struct Trajectory {
  std::vector<Price> prices;
  /// Realized FGFT of each round.
  std::vector<double> rewards;
};

/// Simulates config.horizon rounds. A learner / feedback mismatch throws
/// ConfigError before the first round.
Trajectory run_episode(const RunConfig& config, std::size_t episode_index);

/// sum_t (v* - E[fgft(P_t, S, B)]) with v* the best fixed-price value.
double pseudo_regret(const FiniteJointDistribution& dist, std::span<const Price> prices);
double pseudo_regret(const RunConfig& config, const Trajectory& trajectory);

struct RegretCurve {
  std::vector<std::size_t> horizons;
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::size_t n_episodes = 0;
};

/// Per horizon: mean and standard error (sample sd / sqrt(n), zero for n = 1)
/// of the pseudo-regret over config.n_episodes seeded episodes. Results are
/// reduced in episode order, independent of the thread count.
RegretCurve run_monte_carlo(const RunConfig& config, std::span<const std::size_t> horizons);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(mean) on log(T). Needs >= 3 points, all means > 0;
/// throws std::invalid_argument otherwise.
ExponentFit fit_exponent(std::span<const std::size_t> horizons, std::span<const double> means);
ExponentFit fit_exponent(const RegretCurve& curve);

struct SweepReport {
  std::string learner;
  std::size_t horizon = 0;
  double buyer = 1.0;
  std::vector<double> seller_grid;
  std::vector<double> regret;
  double max_regret = 0.0;
  double argmax_seller = 0.0;
};

/// Exact pseudo-regret of `learner` on det(s, buyer) for every s on an
/// evenly spaced grid of grid_points values over [0, s_max]; reports the
/// worst case (smallest s on ties). grid_points = 1 evaluates s = 0 only.
SweepReport adversarial_deterministic_sweep(const std::string& learner, std::size_t horizon,
                                            std::size_t grid_points = 4097, double s_max = 0.25,
                                            double buyer = 1.0, std::size_t threads = 1);

/// Runs a two-bit learner where each round's feedback is drawn directly from
/// feedback_distribution(env, P_t) by inverse CDF on one uniform, in outcome
/// order (1,1), (1,0), (0,1), (0,0). Two environments with equal feedback laws
/// yield bit-identical price sequences under the same seed.
std::vector<Price> run_feedback_coupled(const EnvironmentSpec& env, const std::string& learner,
                                        std::size_t horizon, std::uint64_t seed);

struct IndistinguishabilityReport {
  std::size_t regions = 0;
  /// Largest |P_mu(outcome) - P_nu(outcome)| over all regions and outcomes.
  double max_table_difference = 0.0;
  bool tables_equal = false;
  /// Learner ids whose coupled price sequences on mu and nu differ.
  std::vector<std::string> coupling_mismatches;
  /// min over a grid of fixed prices of max(R_mu, R_nu) / T.
  double min_fixed_price_regret_rate = 0.0;
  bool pass = false;
};

/// Compares the feedback laws of the two indistinguishable instances on the
/// regions induced by their joint support coordinates, replays the given
/// two-bit learners under coupled feedback, and scans fixed prices
/// {0, 1/200, ..., 1} for the T/48 lower bound.
IndistinguishabilityReport indistinguishability_check(
    const std::vector<std::string>& learners = {"conv-pricing", "dbs"},
    std::size_t horizon = 1000, std::size_t coupled_seeds = 20);

/// CSV serialization, 12 significant digits.
std::string curve_csv_header();
std::string curve_csv_rows(const std::string& algorithm, const std::string& env,
                           const RegretCurve& curve, bool with_slope);
std::string sweep_csv(const SweepReport& report);

/// Runs task(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Exceptions propagate after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& task);

}  // namespace ftl
