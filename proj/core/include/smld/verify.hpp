#pragma once

#include <optional>
#include <string>
#include <vector>

namespace smld {

struct CheckResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

// Numbered acceptance checks 1..14; check 15 concerns the CLI itself and is
// run by the acceptance test driver.
constexpr int kFirstCheck = 1;
constexpr int kLastLibraryCheck = 14;

CheckResult run_check(int id);
std::vector<CheckResult> run_acceptance_suite();

}  // namespace smld
