#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smld/analysis.hpp"
#include "smld/operator.hpp"
#include "smld/report.hpp"

namespace smld {

enum class Command { moments, central_moments, asymptotics, apply, converge, eigen, schur, verify_all };

struct RunConfig {
  Command command = Command::moments;
  OperatorParams params;
  std::vector<double> n_grid{10, 40, 160, 640};
  std::vector<double> x_grid{1.0};
  std::vector<double> t_grid{0.1, 0.5, 1.0, 2.0, 5.0};
  std::string function_spec = "const1";
  NormSpec norm;
  TruncationPolicy policy;
  unsigned max_r = 4;
  unsigned r = 2;
  int iterations = 4;
  Format format = Format::csv;
  std::string output;  // empty: standard output
  bool help = false;
  std::string help_text;
};

enum ExitCode : int { exit_ok = 0, exit_verification = 1, exit_usage = 2, exit_numerical = 3 };

// Throws Error(Errc::usage) naming the offending flag.
RunConfig parse_config(const std::vector<std::string>& args);

// Parses a function description: const1, const:c, monomial:r, poly:c0,c1,...,
// exp:c, abs:c, sqrt, sin:c, file:<path>.
TestFunction parse_function(const std::string& spec);

Report build_report(const RunConfig& config, bool& verification_passed);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smld
