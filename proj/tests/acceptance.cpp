// Acceptance gate: run the eight headline verification suites at a fixed
// seed and report one line per gate. Exit status 0 only if every gate holds.

#include <chrono>
#include <cstdio>

#include "torsion/selfcheck.hpp"

int main() {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = 7;

  const auto t0 = Clock::now();
  const std::vector<torsion::CheckResult> results =
      torsion::run_headline_checks(seed);
  const auto t1 = Clock::now();
  const double ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();

  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const torsion::CheckResult& r = results[i];
    if (!r.pass) ++failed;
    std::printf("[%zu/%zu] %-34s %s  worst %.3e  budget %.0e  %s\n", i + 1,
                results.size(), r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.worst, r.budget, r.detail.c_str());
  }
  std::printf("%d of %zu gates passed in %.0f ms (seed %llu)\n",
              static_cast<int>(results.size()) - failed, results.size(), ms,
              static_cast<unsigned long long>(seed));
  return failed == 0 ? 0 : 1;
}
