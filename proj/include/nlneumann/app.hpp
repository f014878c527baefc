#pragma once

#include <iosfwd>
#include <string>

#include "nlneumann/config.hpp"

namespace nlneumann {

enum ExitCode : int {
  kExitOk = 0,
  kExitSolver = 2,         // Newton did not converge
  kExitPrecondition = 3,   // bad config, precondition or domain error
  kExitAssumption = 4,     // `check` found g^2 = 2F or a ratio at infinity of 1
};

/// Output paths of a run; empty selects the per-subcommand default
/// (sol.csv, curve.csv + report.json, rates.csv, rstar.json, trace.csv,
/// assumptions.json).
struct RunOutputs {
  std::string out;
  std::string report;
  bool quiet = false;
};

/// Executes `subcommand` (solve, scan, asym, rstar, trace, check). Every file
/// is written atomically. Diagnostics go to `err`, summaries to `out` unless
/// quiet. Never throws; failures map to ExitCode.
int run(const RunConfig& config, const std::string& subcommand, const RunOutputs& outputs, std::ostream& out,
        std::ostream& err);

}  // namespace nlneumann
