// Acceptance suite: one PASS/FAIL line per criterion on stdout, per-check
// measurements on stderr. Usage: ftl_acceptance [criterion number ...]
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ftl/verify.hpp"

namespace {

struct Criterion {
  int number;
  const char* title;
  const char* suite;
};

constexpr Criterion kCriteria[] = {
    {1, "convolution identity within 1e-4 on a 50^3 grid, M = 1e4, < 5 s", "convolution-lemma"},
    {2, "sandwich in [0, 1/K] within 1e-10, 100 pairs, K in {10,100,1000}, < 30 s", "sandwich"},
    {3, "mu/nu feedback tables equal; conv-pricing regret >= T/48 - 3 se at T = 1e4, < 1 min",
     "indistinguishability"},
    {4, "gft-oracle regret on gft-trap:h=0.1 equals 200 within 1e-8 at T = 1e3, < 1 s", "gft-trap"},
    {5, "dbs regret <= 1 + 2 ceil(log2 T) on a 65x65 grid, T up to 1e5, < 2 min", "dbs-bound"},
    {6, "dbs sweep max non-decreasing, growth <= 2.5 per doubling, T = 2^8..2^16, < 2 min",
     "dbs-log-growth"},
    {7, "conv-pricing slope in [0.50, 0.80], normalized regret bounded, T up to 1e6, < 10 min",
     "conv-pricing-rate"},
    {8, "fbep slope <= 0.62, regret/sqrt(T) max/min <= 3; det regret <= 1/2, < 10 min",
     "fbep-rate"},
    {9, "eps-family closed forms within 1e-12, argmax and eps/16 gaps, < 5 s", "eps-family"},
    {10, "exact oracle vs 1e-4 grid within 1e-4 on 100 random joints, < 30 s",
     "oracle-equivalence"},
};

bool run(const Criterion& c) {
  const auto results = ftl::verify::run_suite(c.suite, {0});
  bool pass = !results.empty();
  for (const auto& r : results) {
    std::fprintf(stderr, "  [%d] %s %s: measured=%.17g tolerance=%.17g runtime_ms=%.1f %s\n",
                 c.number, r.pass ? "pass" : "FAIL", r.check.c_str(), r.measured, r.tolerance,
                 r.runtime_ms, r.detail.c_str());
    pass = pass && r.pass;
  }
  std::printf("criterion %2d %s: %s\n", c.number, pass ? "PASS" : "FAIL", c.title);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  int ran = 0;
  for (const auto& c : kCriteria) {
    bool wanted = selected.empty();
    for (int n : selected) wanted = wanted || n == c.number;
    if (!wanted) continue;
    all_pass = run(c) && all_pass;
    ++ran;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion selected\n");
    return 2;
  }
  return all_pass ? 0 : 1;
}
