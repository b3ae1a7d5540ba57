#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ftl/environment.hpp"
#include "ftl/errors.hpp"
#include "ftl/learner.hpp"
#include "ftl/verify.hpp"

namespace ftl::cli {
namespace {

using nlohmann::json;

template <typename T>
T field(const json& object, const char* key, T fallback) {
  const auto it = object.find(key);
  if (it == object.end()) return fallback;
  return it->get<T>();
}

std::vector<std::size_t> parse_horizons(const json& value) {
  if (!value.is_array() || value.empty()) throw ConfigError("horizons must be a non-empty array");
  std::vector<std::size_t> horizons;
  for (const auto& h : value) {
    if (!h.is_number_unsigned() || h.get<std::size_t>() == 0) {
      throw ConfigError("horizons must be positive integers");
    }
    horizons.push_back(h.get<std::size_t>());
  }
  if (!std::is_sorted(horizons.begin(), horizons.end())) {
    throw ConfigError("horizons must be sorted ascending");
  }
  return horizons;
}

RunEntry parse_run(const json& run, const std::optional<std::vector<std::size_t>>& defaults) {
  if (!run.is_object()) throw ConfigError("each run must be an object");
  RunEntry entry;
  if (!run.contains("env")) throw ConfigError("run is missing \"env\"");
  if (!run.contains("learner") || !run["learner"].is_string()) {
    throw ConfigError("run is missing a string \"learner\"");
  }
  entry.config.env = parse_environment_json(run["env"].dump());
  entry.config.learner = run["learner"].get<std::string>();
  check_learner_id(entry.config.learner);
  entry.config.n_episodes = field<std::size_t>(run, "n_episodes", 1);
  if (entry.config.n_episodes == 0) throw ConfigError("n_episodes must be at least 1");
  entry.config.base_seed = field<std::uint64_t>(run, "base_seed", 0);
  entry.config.strict_feedback = field<bool>(run, "strict_feedback", false);
  if (run.contains("feedback")) {
    entry.config.feedback = parse_feedback_model(run["feedback"].get<std::string>());
  }
  if (run.contains("horizons")) {
    entry.horizons = parse_horizons(run["horizons"]);
  } else if (defaults) {
    entry.horizons = *defaults;
  } else {
    throw ConfigError("run has no horizons and no top-level default");
  }
  return entry;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buffer.str();
}

bool write_output(const std::optional<std::string>& path, const std::string& text,
                  std::ostream& out, std::ostream& err) {
  if (!path) {
    out << text;
    return true;
  }
  std::ofstream file(*path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write '" << *path << "'\n";
    return false;
  }
  return true;
}

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  bool strict_feedback = false;
};

int cmd_run(const Flags& flags, std::ostream& out, std::ostream& err) {
  if (!flags.config) {
    err << "error: run needs --config PATH\n";
    return kConfigError;
  }
  const auto text = read_file(*flags.config);
  if (!text) {
    err << "error: cannot read config '" << *flags.config << "'\n";
    return kConfigError;
  }
  ExperimentFile experiment;
  try {
    experiment = parse_experiment(*text);
  } catch (const IdResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kIdError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  const std::size_t threads = resolve_threads(flags.threads);
  for (auto& run : experiment.runs) {
    run.config.threads = threads;
    if (flags.seed) run.config.base_seed = *flags.seed;
    if (flags.strict_feedback) run.config.strict_feedback = true;
  }
  std::string csv;
  try {
    csv = run_experiment(experiment, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  const auto path = flags.out ? flags.out : experiment.output;
  return write_output(path, csv, out, err) ? kOk : kConfigError;
}

struct SweepFlags {
  std::string learner = "dbs";
  std::size_t horizon = 1024;
  std::size_t grid = 4097;
  double s_max = 0.25;
  double buyer = 1.0;
};

int cmd_sweep(const Flags& flags, const SweepFlags& sweep, std::ostream& out, std::ostream& err) {
  SweepReport report;
  try {
    report = adversarial_deterministic_sweep(sweep.learner, sweep.horizon, sweep.grid, sweep.s_max,
                                             sweep.buyer, resolve_threads(flags.threads));
  } catch (const IdResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kIdError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (!write_output(flags.out, sweep_csv(report), out, err)) return kConfigError;
  char summary[256];
  std::snprintf(summary, sizeof summary,
                "sweep learner=%s T=%zu grid=%zu buyer=%.12g max_regret=%.12g argmax_seller=%.12g\n",
                report.learner.c_str(), report.horizon, report.seller_grid.size(), report.buyer,
                report.max_regret, report.argmax_seller);
  (flags.out ? out : err) << summary;
  return kOk;
}

int cmd_verify(const Flags& flags, const std::string& suite, std::ostream& out,
               std::ostream& err) {
  std::vector<verify::CheckResult> results;
  try {
    results = verify::run_suite(suite, {resolve_threads(flags.threads)});
  } catch (const IdResolutionError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  bool all_pass = true;
  for (const auto& r : results) {
    char line[512];
    std::snprintf(line, sizeof line, "%s %s measured=%.6g tolerance=%.6g (%.0f ms) %s\n",
                  r.pass ? "PASS" : "FAIL", r.check.c_str(), r.measured, r.tolerance,
                  r.runtime_ms, r.detail.c_str());
    err << line;
    all_pass = all_pass && r.pass;
  }
  if (!write_output(flags.out, verify::report_json(results) + '\n', out, err)) return kConfigError;
  return all_pass ? kOk : kCheckFailed;
}

void print_registry(const std::vector<RegistryEntry>& entries, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& e : entries) width = std::max(width, e.pattern.size());
  for (const auto& e : entries) {
    out << e.pattern << std::string(width - e.pattern.size() + 2, ' ') << e.description << '\n';
  }
}

}  // namespace

ExperimentFile parse_experiment(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentFile experiment;
    if (doc.contains("output")) experiment.output = doc["output"].get<std::string>();
    std::optional<std::vector<std::size_t>> defaults;
    if (doc.contains("horizons")) defaults = parse_horizons(doc["horizons"]);
    if (!doc.contains("runs") || !doc["runs"].is_array() || doc["runs"].empty()) {
      throw ConfigError("config needs a non-empty \"runs\" array");
    }
    for (const auto& run : doc["runs"]) experiment.runs.push_back(parse_run(run, defaults));
    return experiment;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
  }
}

std::string run_experiment(const ExperimentFile& experiment, std::ostream& log) {
  std::string csv = curve_csv_header();
  std::size_t index = 0;
  for (const auto& run : experiment.runs) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    const auto curve = run_monte_carlo(run.config, run.horizons);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    csv += curve_csv_rows(run.config.learner, run.config.env.id(), curve, true);
    char line[512];
    std::snprintf(line, sizeof line, "[%zu/%zu] %s on %s: %zu horizons x %zu episodes, %.0f ms\n",
                  index, experiment.runs.size(), run.config.learner.c_str(),
                  run.config.env.id().c_str(), run.horizons.size(), run.config.n_episodes, ms);
    log << line;
  }
  return csv;
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FTL_THREADS")) {
    std::size_t value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end) return value;
  }
  return 0;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair bilateral trade simulation and verification harness", "ftl"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--threads", flags.threads, "Worker cap (0 = hardware concurrency)");
  app.add_option("--out", flags.out, "Output path (default: stdout)");

  auto* run = app.add_subcommand("run", "Run an experiment file and write a regret-curve CSV");
  run->add_option("--config", flags.config, "Experiment JSON")->required();
  run->add_option("--seed", flags.seed, "Override base_seed of every run");
  run->add_flag("--strict-feedback", flags.strict_feedback,
                "Reject learners run under a feedback model they do not natively use");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Adversarial deterministic sweep over seller values");
  sweep->add_option("--learner", sweep_flags.learner, "Learner id")->capture_default_str();
  sweep->add_option("--horizon,-T", sweep_flags.horizon, "Horizon")->capture_default_str();
  sweep->add_option("--grid", sweep_flags.grid, "Grid points")->capture_default_str();
  sweep->add_option("--s-max", sweep_flags.s_max, "Largest seller value")->capture_default_str();
  sweep->add_option("--buyer", sweep_flags.buyer, "Buyer value")->capture_default_str();

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "Run verification suites, JSON report");
  verify->add_option("suite", suite, "Suite name or \"all\"")->capture_default_str();

  auto* envs = app.add_subcommand("list-envs", "List environment ids");
  auto* learners = app.add_subcommand("list-learners", "List learner ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (run->parsed()) return cmd_run(flags, out, err);
  if (sweep->parsed()) return cmd_sweep(flags, sweep_flags, out, err);
  if (verify->parsed()) return cmd_verify(flags, suite, out, err);
  if (envs->parsed()) print_registry(registered_environments(), out);
  if (learners->parsed()) print_registry(registered_learners(), out);
  return kOk;
}

}  // namespace ftl::cli
