#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "nlneumann/solver.hpp"

namespace nlneumann {

/// Energy identity of a Dirichlet solve, with eps U'(1) in place of g(lambda):
///   eps^2 U'(1)^2 / 2 - F(lambda) + (2N-2) int_0^1 x^(2N-3) F(U) dx + [N = 1] F(U(0)) = 0.
struct IdentityResidual {
  double lambda = 0.0;
  double epsilon = 0.0;
  double lhs = 0.0;            // eps^2 U'(1)^2 / 2 - F(lambda)
  double integral_term = 0.0;  // (2N-2) int x^(2N-3) F(U)
  double origin_term = 0.0;    // F(U(0)) for N = 1, else 0
  double residual = 0.0;
};

IdentityResidual energy_identity_residual(const DirichletSolution& solution);

/// eps^2 U'(1)^2 / (2 F(lambda)) of a single solve. Throws PreconditionError
/// when F(lambda) = 0.
double boundary_energy_ratio(const DirichletSolution& solution);

/// Per-rung quantities along a decreasing eps ladder and their log-log fit.
struct RateFit {
  std::string kind;  // "case1" or "case2"
  std::vector<double> epsilons;
  std::vector<double> lambdas;
  std::vector<double> quantities;  // NaN where the rung failed
  std::vector<double> bounds;
  std::vector<std::string> failures;  // empty string where the rung succeeded
  double fitted_slope = 0.0;          // least squares over the last four successful rungs
  std::array<double, 2> expected_slope_range{0.0, 0.0};
  bool slope_checked = false;  // false when no power law is expected (N = 1)
  bool slope_in_range = false;
  bool within_bounds = false;  // every quantity below its bound
  bool monotone = false;       // case 1: decreasing; case 2: non-decreasing within 1e-6
  bool final_in_range = false; // case 2 only: last ratio in [0.85, 1.15]

  bool all_ok() const;
};

/// Throws PreconditionError unless the ladder has at least 4 strictly
/// decreasing positive rungs.
void validate_ladder(const std::vector<double>& ladder);

/// |eps^2 U'(1)^2 / 2 - F(lambda)| at fixed lambda along the ladder, against
/// the bound (2 lambda f(lambda) / M) eps.
/// Throws PreconditionError for lambda = 0, a bad ladder or M = 0.
RateFit case1_rate(const Problem& family, double lambda, const std::vector<double>& ladder,
                   const SolverOptions& options = {});

using LambdaSchedule = std::function<double(double epsilon)>;

/// lambda(eps) = min(1/eps, cap).
LambdaSchedule inverse_epsilon_schedule(double cap = 50.0);

/// Ratio eps^2 U'(1)^2 / (2 F(lambda(eps))) along the ladder. The bound column
/// is the admissible deviation |1 - ratio| <= 4 (N-1) eps / M.
/// Throws PreconditionError when |lambda(eps)| does not strictly increase as
/// eps decreases, or for a bad ladder.
RateFit case2_ratio(const Problem& family, const LambdaSchedule& schedule, const std::vector<double>& ladder,
                    const SolverOptions& options = {});

/// Decay envelope of one solve; same contract as verify_comparison.
BoundReport decay_envelope(const DirichletSolution& solution, double M);

}  // namespace nlneumann
