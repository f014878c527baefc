#pragma once

#include <string>
#include <vector>

#include "nlneumann/nonlinearity.hpp"
#include "nlneumann/solver.hpp"

namespace nlneumann {

/// Phi(lambda) = eps U'(1) - g(lambda) for the Dirichlet solve U(1) = lambda.
struct MismatchSample {
  double lambda = 0.0;
  double eps_dU1 = 0.0;
  double g_lambda = 0.0;
  double phi = 0.0;
};

struct MismatchRoot {
  double lambda = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double phi_residual = 0.0;
  bool exact = false;  // a grid sample with phi == 0, e.g. lambda = 0 when g(0) = 0
};

enum class SignPattern { all_positive, all_negative, mixed };

std::string to_string(SignPattern pattern);

struct MismatchCurve {
  Problem problem;
  BoundaryFlux flux = BoundaryFlux::constant(0.0);
  SolverOptions options;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::vector<MismatchSample> samples;  // successful samples, increasing lambda
  std::vector<MismatchRoot> roots;
  std::vector<double> inconclusive;     // lambdas with |phi| < 10 tol and no sign change
  int failed_samples = 0;
  std::vector<std::string> warnings;
};

struct ExistenceReport {
  int n_roots = 0;
  double min_abs_phi = 0.0;
  SignPattern phi_sign_pattern = SignPattern::mixed;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::vector<double> inconclusive_flags;
};

/// One Dirichlet solve at lambda, then Phi. Solver errors propagate.
MismatchSample mismatch(const Problem& problem, const BoundaryFlux& flux, double lambda,
                        const SolverOptions& options = {});

/// Phi at n_samples affinely spaced lambdas including both ends, solved
/// concurrently, followed by find_roots. A sample whose solve fails with
/// SolverError is dropped and counted in `failed_samples`.
///
/// Throws PreconditionError unless lambda_min < lambda_max and n_samples >= 3.
MismatchCurve scan(const Problem& problem, const BoundaryFlux& flux, double lambda_min, double lambda_max,
                   int n_samples, const SolverOptions& options = {}, double refine_tol = 1e-8);

/// Rebuilds `roots` and `inconclusive` from the samples. Each sign change is
/// bisected with fresh solves until the bracket is at most refine_tol wide;
/// samples with phi == 0 are exact roots.
MismatchCurve find_roots(MismatchCurve curve, double refine_tol);

ExistenceReport existence_report(const MismatchCurve& curve);

}  // namespace nlneumann
