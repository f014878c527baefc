#pragma once

#include <string>
#include <vector>

#include "nlneumann/mismatch.hpp"

namespace nlneumann {

enum class RstarStatus { bracketed, no_root_anywhere, root_persists_to_Rmax, inconclusive };

std::string to_string(RstarStatus status);

/// Lambda window and sampling used for every root-presence scan.
struct ScanWindow {
  double lambda_min = -10.0;
  double lambda_max = 10.0;
  int samples = 201;
  double refine_tol = 1e-8;

  bool operator==(const ScanWindow&) const = default;
};

/// Outcome of one scan at radius R (eps = 1/R).
struct RootProbe {
  double R = 0.0;
  int n_roots = 0;
  std::vector<double> roots;
  bool inconclusive = false;
  int failed_samples = 0;
};

/// Bracket [r_low, r_high] for the radius beyond which the window holds no
/// root. Window-relative: roots outside the scan window are never seen.
struct RstarEstimate {
  double r_low = 0.0;   // largest probed R with a root (NaN if none)
  double r_high = 0.0;  // smallest probed R without a root (NaN if none)
  int iterations = 0;
  ScanWindow scan_window;
  RstarStatus status = RstarStatus::inconclusive;
  std::vector<RootProbe> probes;  // in probing order
  std::vector<std::string> warnings;
};

RootProbe probe_radius(const Problem& family, const BoundaryFlux& flux, double R, const ScanWindow& window,
                       const SolverOptions& options = {});

/// Scans at r_min and r_max; when the first has a root and the second none,
/// bisects on R until r_high - r_low <= bisect_tol (0.05 r_low when
/// bisect_tol <= 0). Any inconclusive scan makes the status inconclusive.
/// A failing flux assumption check only adds a warning.
///
/// Throws PreconditionError unless 0 < r_min < r_max.
RstarEstimate estimate_rstar(const Problem& family, const BoundaryFlux& flux, const ScanWindow& window,
                             double r_min, double r_max, double bisect_tol = 0.0, const SolverOptions& options = {});

struct TraceRow {
  double R = 0.0;
  int n_roots = 0;
  std::vector<double> roots;
  bool inconclusive = false;
  std::string error;  // non-empty when the scan at this R failed
};

/// One scan per rung of a strictly increasing, non-empty R ladder.
std::vector<TraceRow> root_trace(const Problem& family, const BoundaryFlux& flux, const std::vector<double>& r_ladder,
                                 const ScanWindow& window, const SolverOptions& options = {});

/// Number of changes between "has roots" and "has none" along the trace,
/// skipping failed rungs.
int presence_transitions(const std::vector<TraceRow>& trace);

}  // namespace nlneumann
