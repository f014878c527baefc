#include "nlneumann/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "nlneumann/errors.hpp"
#include "nlneumann/parallel.hpp"

namespace nlneumann {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCase2Slack = 1e-6;

double power(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double coercivity_of(const Problem& family) {
  const double M = family.reaction.coercivity();
  if (!(M > 0.0)) throw PreconditionError("reaction has no coercivity constant M > 0");
  return M;
}

// Least-squares slope of log q against log eps over the last four usable rungs.
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& q) {
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = eps.size(); i-- > 0 && points.size() < 4;) {
    if (std::isfinite(q[i]) && q[i] > 0.0) points.emplace_back(std::log(eps[i]), std::log(q[i]));
  }
  if (points.size() < 2) return kNaN;
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / points.size();
  const double my = sy / points.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return sxy / sxx;
}

// Solves every rung concurrently; failed rungs keep a NaN quantity.
template <class Quantity>
void run_ladder(RateFit& fit, const Problem& family, const SolverOptions& options, Quantity&& quantity) {
  const std::size_t n = fit.epsilons.size();
  fit.quantities.assign(n, kNaN);
  fit.failures.assign(n, "");
  detail::parallel_for(n, [&](std::size_t k) {
    Problem rung = family;
    rung.epsilon = fit.epsilons[k];
    try {
      const auto solution = solve_dirichlet(rung, fit.lambdas[k], options);
      fit.quantities[k] = quantity(solution);
    } catch (const SolverError& e) {
      fit.failures[k] = e.what();
    }
  });
}

}  // namespace

IdentityResidual energy_identity_residual(const DirichletSolution& solution) {
  const auto& reaction = solution.problem.reaction;
  const int N = solution.problem.dimension;
  IdentityResidual r;
  r.lambda = solution.lambda;
  r.epsilon = solution.problem.epsilon;
  const double d = solution.boundary_derivative;
  r.lhs = 0.5 * d * d - reaction.F(solution.lambda);
  if (N >= 2) {
    r.integral_term =
        (2.0 * N - 2.0) * integrate(solution, [&](double x, double u) { return power(x, 2 * N - 3) * reaction.F(u); });
  } else {
    r.origin_term = reaction.F(solution.values.front());
  }
  r.residual = r.lhs + r.integral_term + r.origin_term;
  return r;
}

double boundary_energy_ratio(const DirichletSolution& solution) {
  const double F = solution.problem.reaction.F(solution.lambda);
  if (!(F > 0.0)) throw PreconditionError("energy ratio needs F(lambda) > 0");
  const double d = solution.boundary_derivative;
  return d * d / (2.0 * F);
}

bool RateFit::all_ok() const {
  for (const auto& f : failures) {
    if (!f.empty()) return false;
  }
  if (!within_bounds || !monotone) return false;
  if (slope_checked && !slope_in_range) return false;
  if (kind == "case2" && !final_in_range) return false;
  return true;
}

void validate_ladder(const std::vector<double>& ladder) {
  if (ladder.size() < 4) throw PreconditionError("epsilon ladder needs at least 4 rungs");
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] > 0.0) || !std::isfinite(ladder[k])) throw PreconditionError("epsilon ladder must be positive");
    if (k > 0 && !(ladder[k] < ladder[k - 1])) throw PreconditionError("epsilon ladder must strictly decrease");
  }
}

RateFit case1_rate(const Problem& family, double lambda, const std::vector<double>& ladder,
                   const SolverOptions& options) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw PreconditionError("case 1 needs a fixed lambda != 0");
  validate_ladder(ladder);
  validate(family);
  const double M = coercivity_of(family);
  const double scale = 2.0 * std::fabs(lambda * family.reaction.f(lambda)) / M;

  RateFit fit;
  fit.kind = "case1";
  fit.epsilons = ladder;
  fit.lambdas.assign(ladder.size(), lambda);
  for (double eps : ladder) fit.bounds.push_back(scale * eps);
  run_ladder(fit, family, options, [](const DirichletSolution& s) {
    const double d = s.boundary_derivative;
    return std::fabs(0.5 * d * d - s.problem.reaction.F(s.lambda));
  });

  fit.expected_slope_range = {0.7, 1.3};
  fit.slope_checked = family.dimension >= 2;
  fit.fitted_slope = loglog_slope(fit.epsilons, fit.quantities);
  fit.slope_in_range = fit.fitted_slope >= fit.expected_slope_range[0] && fit.fitted_slope <= fit.expected_slope_range[1];
  fit.within_bounds = true;
  fit.monotone = true;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double q = fit.quantities[k];
    if (!std::isfinite(q)) continue;
    if (!(q <= fit.bounds[k])) fit.within_bounds = false;
    if (!(q < previous)) fit.monotone = false;
    previous = q;
  }
  return fit;
}

LambdaSchedule inverse_epsilon_schedule(double cap) {
  return [cap](double eps) { return std::min(1.0 / eps, cap); };
}

RateFit case2_ratio(const Problem& family, const LambdaSchedule& schedule, const std::vector<double>& ladder,
                    const SolverOptions& options) {
  validate_ladder(ladder);
  validate(family);
  const double M = coercivity_of(family);

  RateFit fit;
  fit.kind = "case2";
  fit.epsilons = ladder;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double lambda = schedule(ladder[k]);
    if (!std::isfinite(lambda) || lambda == 0.0) throw PreconditionError("lambda schedule must be finite and nonzero");
    if (k > 0 && !(std::fabs(lambda) > std::fabs(fit.lambdas.back()))) {
      throw PreconditionError("lambda schedule must grow without bound as epsilon decreases");
    }
    fit.lambdas.push_back(lambda);
    fit.bounds.push_back(4.0 * (family.dimension - 1) * ladder[k] / M);
  }
  for (double lambda : fit.lambdas) family.reaction.F(lambda);  // overflow guard before any solve
  run_ladder(fit, family, options, [](const DirichletSolution& s) { return boundary_energy_ratio(s); });

  fit.expected_slope_range = {0.7, 1.3};
  std::vector<double> deviations;
  for (double r : fit.quantities) deviations.push_back(std::fabs(1.0 - r));
  fit.fitted_slope = loglog_slope(fit.epsilons, deviations);
  fit.slope_checked = false;
  fit.within_bounds = true;
  fit.monotone = true;
  double previous = -std::numeric_limits<double>::infinity();
  double last = kNaN;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double r = fit.quantities[k];
    if (!std::isfinite(r)) continue;
    if (!(std::fabs(1.0 - r) <= fit.bounds[k] + kCase2Slack)) fit.within_bounds = false;
    if (!(r >= previous - kCase2Slack)) fit.monotone = false;
    previous = r;
    last = r;
  }
  fit.final_in_range = last >= 0.85 && last <= 1.15;
  return fit;
}

BoundReport decay_envelope(const DirichletSolution& solution, double M) { return verify_comparison(solution, M); }

}  // namespace nlneumann
