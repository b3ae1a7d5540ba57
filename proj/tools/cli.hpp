#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ftl/harness.hpp"

namespace ftl::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kIdError = 3,
};

struct RunEntry {
  RunConfig config;
  std::vector<std::size_t> horizons;
};

/// {"output": path?, "horizons": [T...]?, "runs": [{"env", "learner",
/// "n_episodes", "base_seed", "feedback", "strict_feedback", "horizons"}]}.
/// A run without its own "horizons" uses the top-level list.
struct ExperimentFile {
  std::vector<RunEntry> runs;
  std::optional<std::string> output;
};

/// Throws ConfigError on malformed input and IdResolutionError on unknown ids.
ExperimentFile parse_experiment(std::string_view json_text);

/// CSV for every run, one log line per run on `log`.
std::string run_experiment(const ExperimentFile& experiment, std::ostream& log);

/// Thread cap: the flag if given, else FTL_THREADS, else 0.
std::size_t resolve_threads(std::optional<std::size_t> flag);

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ftl::cli
