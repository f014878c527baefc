#include "nlneumann/rstar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlneumann/errors.hpp"

namespace nlneumann {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool has_roots(const RootProbe& p) { return p.n_roots > 0; }

// Root presence must switch at most once, from present to absent, as R grows.
bool presence_is_monotone(std::vector<RootProbe> probes) {
  std::sort(probes.begin(), probes.end(), [](const auto& a, const auto& b) { return a.R < b.R; });
  bool absent_seen = false;
  for (const auto& p : probes) {
    if (!has_roots(p)) absent_seen = true;
    else if (absent_seen) return false;
  }
  return true;
}

}  // namespace

std::string to_string(RstarStatus status) {
  switch (status) {
    case RstarStatus::bracketed: return "bracketed";
    case RstarStatus::no_root_anywhere: return "no_root_anywhere";
    case RstarStatus::root_persists_to_Rmax: return "root_persists_to_Rmax";
    case RstarStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

RootProbe probe_radius(const Problem& family, const BoundaryFlux& flux, double R, const ScanWindow& window,
                       const SolverOptions& options) {
  if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("radius must be positive");
  Problem problem = family;
  problem.epsilon = 1.0 / R;
  const auto curve = scan(problem, flux, window.lambda_min, window.lambda_max, window.samples, options,
                          window.refine_tol);
  RootProbe probe;
  probe.R = R;
  probe.n_roots = static_cast<int>(curve.roots.size());
  for (const auto& root : curve.roots) probe.roots.push_back(root.lambda);
  probe.inconclusive = !curve.inconclusive.empty();
  probe.failed_samples = curve.failed_samples;
  return probe;
}

RstarEstimate estimate_rstar(const Problem& family, const BoundaryFlux& flux, const ScanWindow& window,
                             double r_min, double r_max, double bisect_tol, const SolverOptions& options) {
  if (!(r_min > 0.0) || !(r_min < r_max) || !std::isfinite(r_max)) {
    throw PreconditionError("rstar needs 0 < r_min < r_max");
  }
  RstarEstimate est;
  est.scan_window = window;
  est.r_low = kNaN;
  est.r_high = kNaN;
  try {
    if (!check_assumptions(family.reaction, flux).flux_condition_holds()) {
      est.warnings.push_back("flux assumption g^2 != 2F fails on the check grid");
    }
  } catch (const std::exception& e) {
    est.warnings.push_back(std::string("flux assumption check failed: ") + e.what());
  }

  auto lo = probe_radius(family, flux, r_min, window, options);
  auto hi = probe_radius(family, flux, r_max, window, options);
  est.probes = {lo, hi};
  for (const auto& p : est.probes) {
    if (p.failed_samples > 0) est.warnings.push_back("scan at R=" + std::to_string(p.R) + " dropped failed samples");
  }
  if (lo.inconclusive || hi.inconclusive) {
    est.status = RstarStatus::inconclusive;
  } else if (has_roots(hi)) {
    est.status = RstarStatus::root_persists_to_Rmax;
    est.r_low = r_max;
  } else if (!has_roots(lo)) {
    est.status = RstarStatus::no_root_anywhere;
    est.r_high = r_min;
  } else {
    est.status = RstarStatus::bracketed;
    auto width_ok = [&] {
      const double tol = bisect_tol > 0.0 ? bisect_tol : 0.05 * lo.R;
      return hi.R - lo.R <= tol;
    };
    while (!width_ok()) {
      const auto mid = probe_radius(family, flux, 0.5 * (lo.R + hi.R), window, options);
      est.probes.push_back(mid);
      ++est.iterations;
      if (mid.failed_samples > 0) est.warnings.push_back("scan at R=" + std::to_string(mid.R) + " dropped failed samples");
      if (mid.inconclusive) {
        est.status = RstarStatus::inconclusive;
        break;
      }
      if (has_roots(mid)) lo = mid;
      else hi = mid;
    }
    est.r_low = lo.R;
    est.r_high = hi.R;
  }
  if (est.status != RstarStatus::inconclusive && !presence_is_monotone(est.probes)) {
    est.status = RstarStatus::inconclusive;
    est.warnings.push_back("root presence is not monotone in R");
  }
  return est;
}

std::vector<TraceRow> root_trace(const Problem& family, const BoundaryFlux& flux, const std::vector<double>& r_ladder,
                                 const ScanWindow& window, const SolverOptions& options) {
  if (r_ladder.empty()) throw PreconditionError("R ladder is empty");
  for (std::size_t k = 0; k < r_ladder.size(); ++k) {
    if (!(r_ladder[k] > 0.0)) throw PreconditionError("R ladder must be positive");
    if (k > 0 && !(r_ladder[k] > r_ladder[k - 1])) throw PreconditionError("R ladder must strictly increase");
  }
  std::vector<TraceRow> rows;
  for (double R : r_ladder) {
    TraceRow row;
    row.R = R;
    try {
      const auto probe = probe_radius(family, flux, R, window, options);
      row.n_roots = probe.n_roots;
      row.roots = probe.roots;
      row.inconclusive = probe.inconclusive;
    } catch (const SolverError& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int presence_transitions(const std::vector<TraceRow>& trace) {
  int transitions = 0;
  int previous = -1;
  for (const auto& row : trace) {
    if (!row.error.empty()) continue;
    const int present = row.n_roots > 0 ? 1 : 0;
    if (previous >= 0 && present != previous) ++transitions;
    previous = present;
  }
  return transitions;
}

}  // namespace nlneumann
