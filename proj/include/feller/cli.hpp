#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "feller/catalog.hpp"
#include "feller/inversion.hpp"

namespace feller {

struct RunConfig {
  std::string process;
  ProcessParams params;
  std::vector<double> t_grid;       // empty: command default
  std::vector<double> lambda_grid;  // empty: command default
  double decay_tol = 1e-3;
  std::uint64_t seed = 42;
  std::optional<std::string> report_path;  // stdout when absent
  std::string format;                      // empty: command default
  std::optional<double> t;
  double term_tol = 1e-12;
  Summation summation = Summation::compensated;
};

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kConfigError = 1, kMismatch = 2, kSplitVerdict = 3 };

void cmd_list(std::ostream& out);
int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_resolvent(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses `feller-kit <command> [flags]` and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace feller
