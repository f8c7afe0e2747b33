#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "catoptrica/config.hpp"

namespace catoptrica::cli {

enum class Command { reflect, focal, wavefront, verify };

struct RunOptions {
  bool numeric = false;     // focal: append finite-difference root rows
  bool signs_all = false;   // sweep all four sign combinations
  std::string out;          // output path; overrides the config value
  std::optional<OutputFormat> format;  // overrides the config value
  int threads = 1;
  bool corrupt_reflection = false;  // test hook: break the verify pipeline
};

// Executes one subcommand. Returns the process exit code: 0 on success, 2
// when verification fails, 1 on configuration or runtime errors (which are
// reported on `log`). Per-point degeneracies never abort a sweep; they are
// written to "<out>.diagnostics.csv".
int run(Command cmd, const RunConfig& cfg, const RunOptions& opt,
        std::ostream& log);

// Verification battery backing the `verify` subcommand.
struct CheckResult {
  std::string name;
  double value = 0.0;      // measured residual (or violation count)
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<CheckResult> run_verification(const RunConfig& cfg,
                                          const RunOptions& opt);

// Deterministic float formatting shared by all writers (17 significant
// digits).
std::string format_double(double x);

}  // namespace catoptrica::cli
