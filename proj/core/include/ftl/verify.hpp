#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ftl::verify {

/// One verification check. `measured` is compared against `tolerance` in the
/// way described by `detail`; runtime budgets are part of `pass`.
struct CheckResult {
  std::string check;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  double runtime_ms = 0.0;
  std::string detail;
};

struct Options {
  /// Worker cap for Monte Carlo suites; 0 = hardware concurrency.
  std::size_t threads = 0;
};

/// Suite names in canonical order.
std::vector<std::string> suite_names();

/// Runs one suite, or every suite for "all". Throws IdResolutionError for an
/// unknown name.
std::vector<CheckResult> run_suite(std::string_view name, const Options& options = {});

/// JSON array of {check, pass, measured, tolerance, runtime_ms}.
std::string report_json(std::span<const CheckResult> results);

}  // namespace ftl::verify
