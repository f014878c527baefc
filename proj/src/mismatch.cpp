#include "nlneumann/mismatch.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "nlneumann/errors.hpp"
#include "nlneumann/parallel.hpp"

namespace nlneumann {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

MismatchRoot bisect(const MismatchCurve& curve, MismatchSample lo, MismatchSample hi, double refine_tol) {
  MismatchRoot root;
  while (hi.lambda - lo.lambda > refine_tol) {
    const double mid = 0.5 * (lo.lambda + hi.lambda);
    if (mid <= lo.lambda || mid >= hi.lambda) break;
    const auto s = mismatch(curve.problem, curve.flux, mid, curve.options);
    if (s.phi == 0.0) {
      root.lambda = mid;
      root.bracket_lo = lo.lambda;
      root.bracket_hi = hi.lambda;
      root.phi_residual = 0.0;
      return root;
    }
    if (sign(s.phi) == sign(lo.phi)) lo = s;
    else hi = s;
  }
  root.bracket_lo = lo.lambda;
  root.bracket_hi = hi.lambda;
  root.lambda = 0.5 * (lo.lambda + hi.lambda);
  root.phi_residual = mismatch(curve.problem, curve.flux, root.lambda, curve.options).phi;
  return root;
}

}  // namespace

std::string to_string(SignPattern pattern) {
  switch (pattern) {
    case SignPattern::all_positive: return "all_positive";
    case SignPattern::all_negative: return "all_negative";
    case SignPattern::mixed: return "mixed";
  }
  return "mixed";
}

MismatchSample mismatch(const Problem& problem, const BoundaryFlux& flux, double lambda,
                        const SolverOptions& options) {
  MismatchSample s;
  s.lambda = lambda;
  s.g_lambda = flux.g(lambda);
  s.eps_dU1 = solve_dirichlet(problem, lambda, options).boundary_derivative;
  s.phi = s.eps_dU1 - s.g_lambda;
  return s;
}

MismatchCurve scan(const Problem& problem, const BoundaryFlux& flux, double lambda_min, double lambda_max,
                   int n_samples, const SolverOptions& options, double refine_tol) {
  if (!(lambda_min < lambda_max) || !std::isfinite(lambda_min) || !std::isfinite(lambda_max)) {
    throw PreconditionError("scan needs lambda_min < lambda_max");
  }
  if (n_samples < 3) throw PreconditionError("scan needs at least 3 samples");
  validate(problem);

  MismatchCurve curve;
  curve.problem = problem;
  curve.flux = flux;
  curve.options = options;
  curve.lambda_min = lambda_min;
  curve.lambda_max = lambda_max;

  const auto count = static_cast<std::size_t>(n_samples);
  std::vector<std::optional<MismatchSample>> results(count);
  std::vector<std::string> failures(count);
  detail::parallel_for(count, [&](std::size_t i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    const double lambda = i + 1 == count ? lambda_max : lambda_min + t * (lambda_max - lambda_min);
    try {
      results[i] = mismatch(problem, flux, lambda, options);
    } catch (const SolverError& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < count; ++i) {
    if (results[i]) {
      curve.samples.push_back(*results[i]);
    } else {
      ++curve.failed_samples;
      curve.warnings.push_back(failures[i]);
    }
  }
  if (curve.samples.size() < 2) {
    std::ostringstream msg;
    msg << "scan kept " << curve.samples.size() << " of " << n_samples << " samples";
    throw SolverError(msg.str(), std::numeric_limits<double>::quiet_NaN());
  }
  return find_roots(std::move(curve), refine_tol);
}

MismatchCurve find_roots(MismatchCurve curve, double refine_tol) {
  const auto& s = curve.samples;
  if (s.size() < 2) throw PreconditionError("find_roots needs at least 2 samples");
  if (!(refine_tol > 0.0)) throw PreconditionError("refine_tol must be positive");
  curve.roots.clear();
  curve.inconclusive.clear();

  std::vector<bool> in_bracket(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].phi == 0.0) {
      MismatchRoot root;
      root.lambda = root.bracket_lo = root.bracket_hi = s[i].lambda;
      root.exact = true;
      curve.roots.push_back(root);
      in_bracket[i] = true;
      continue;
    }
    if (i + 1 < s.size() && s[i + 1].phi != 0.0 && sign(s[i].phi) != sign(s[i + 1].phi)) {
      curve.roots.push_back(bisect(curve, s[i], s[i + 1], refine_tol));
      in_bracket[i] = in_bracket[i + 1] = true;
    }
  }
  const double threshold = 10.0 * curve.options.tol;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!in_bracket[i] && std::fabs(s[i].phi) < threshold) curve.inconclusive.push_back(s[i].lambda);
  }
  return curve;
}

ExistenceReport existence_report(const MismatchCurve& curve) {
  ExistenceReport report;
  report.n_roots = static_cast<int>(curve.roots.size());
  report.lambda_min = curve.lambda_min;
  report.lambda_max = curve.lambda_max;
  report.inconclusive_flags = curve.inconclusive;
  report.min_abs_phi = std::numeric_limits<double>::infinity();
  bool any_positive = false;
  bool any_negative = false;
  bool any_zero = false;
  for (const auto& s : curve.samples) {
    report.min_abs_phi = std::min(report.min_abs_phi, std::fabs(s.phi));
    any_positive = any_positive || s.phi > 0.0;
    any_negative = any_negative || s.phi < 0.0;
    any_zero = any_zero || s.phi == 0.0;
  }
  if (any_zero || (any_positive && any_negative)) report.phi_sign_pattern = SignPattern::mixed;
  else if (any_positive) report.phi_sign_pattern = SignPattern::all_positive;
  else report.phi_sign_pattern = SignPattern::all_negative;
  return report;
}

}  // namespace nlneumann
