#include <algorithm>
#include <chrono>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "boxl0/cli.hpp"

namespace boxl0::cli {

int cmd_selftest(const std::vector<std::string>& suites, bool inject_fault, std::ostream& out, std::ostream& err) {
  std::vector<SuiteResult> results;
  const auto start = std::chrono::steady_clock::now();
  try {
    results = run_selftest(suites, inject_fault);
  } catch (const std::exception& e) {
    fmt::print(err, "selftest: {}\n", e.what());
    return kExitUsage;
  }
  bool all = true;
  for (const auto& r : results) {
    fmt::print(out, "{:<10} {}  {}\n", r.name, r.passed ? "PASS" : "FAIL", r.detail);
    all = all && r.passed;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print(out, "{} of {} suites passed in {:.2f} s\n",
             std::count_if(results.begin(), results.end(), [](const SuiteResult& r) { return r.passed; }),
             results.size(), secs);
  return all ? kExitOk : kExitFailure;
}

}  // namespace boxl0::cli
