#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlneumann/mesh.hpp"
#include "nlneumann/nonlinearity.hpp"

namespace nlneumann {

/// Radial problem on the unit interval after scaling x = r/R, eps = 1/R:
///   eps^2 (x^(N-1) U')' = x^(N-1) f(U),  U'(0) = 0.
struct Problem {
  int dimension = 2;
  double epsilon = 0.1;
  ReactionTerm reaction = ReactionTerm::sinh();

  double radius() const noexcept { return 1.0 / epsilon; }
};

/// Throws PreconditionError for N < 1 or eps <= 0.
void validate(const Problem& problem);

struct SolverOptions {
  int mesh_n = 512;
  Grading grading = Grading::layer;
  double tol = 1e-10;
  int max_newton = 200;
  int max_halvings = 30;
  bool continuation = true;

  bool operator==(const SolverOptions&) const = default;
};

/// Converged quadratic-element solution of the Dirichlet problem U(1) = lambda.
///
/// Each cell carries a quadratic with values at its two nodes and its
/// midpoint. `values` are the node values, `midpoints` the cell midpoint
/// values, `slopes` eps U'(x) at the nodes, recovered from the integrated
/// equation.
struct DirichletSolution {
  Problem problem;
  double lambda = 0.0;
  Mesh mesh;
  std::vector<double> values;
  std::vector<double> midpoints;
  std::vector<double> slopes;
  double boundary_derivative = 0.0;  // eps U'(1)
  double interior_residual_norm = 0.0;
  int newton_iterations = 0;
  int continuation_steps = 0;

  /// U at any x in [0, 1].
  double eval(double x) const;
};

/// Layer grading with three quarters of the nodes in the layer and a smallest
/// cell of 0.01 eps / sqrt(f'(lambda)), the stiffest local scale.
GradingSpec adapted_grading(const Problem& problem, double lambda, Grading kind = Grading::layer);

/// Solve on a given mesh. Newton starts from U = 0 (away from x = 1); if that
/// fails, eps-continuation runs the ladder max(1, 10 eps), halved down to eps
/// on the same mesh.
///
/// Throws PreconditionError (tol <= 0, invalid problem), DomainError (lambda
/// beyond the reaction's overflow guard) or SolverError.
DirichletSolution solve_dirichlet(const Problem& problem, double lambda, const Mesh& mesh, double tol = 1e-10);

DirichletSolution solve_dirichlet(const Problem& problem, double lambda, const SolverOptions& options,
                                  const Mesh& mesh);

/// Builds the mesh from `options` (adapted to lambda for layer grading).
DirichletSolution solve_dirichlet(const Problem& problem, double lambda, const SolverOptions& options = {});

/// eps U'(1), from the Galerkin balance of the last basis function.
double boundary_derivative(const DirichletSolution& solution);

struct BoundReport {
  bool monotonicity_ok = false;
  bool box_ok = false;
  bool decay_ok = false;         // U <= 2|lambda| exp(-M (1-x) / (4 eps)) + 1e-9
  bool decay_strong_ok = false;  // same with exponent M/eps, informational only
  bool epsilon_in_range = false;
  double epsilon_limit = 0.0;    // decay envelope is guaranteed only below this
  std::string epsilon_limit_source;
  double max_box_violation = 0.0;
  double max_monotonicity_violation = 0.0;
  double max_decay_excess = 0.0;  // max of |U| - envelope over the nodes
};

/// Nodal checks of the comparison bounds and decay envelope.
/// Throws PreconditionError for lambda = 0 or M <= 0.
BoundReport verify_comparison(const DirichletSolution& solution, double M);

namespace detail {

// Five-point Gauss-Legendre rule on [0, 1].
inline constexpr std::array<double, 5> kGaussPoints = {
    0.046910077030668003601, 0.23076534494715845448, 0.5, 0.76923465505284154552, 0.95308992296933199640};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.11846344252809454376, 0.23931433524968323402, 0.28444444444444444444, 0.23931433524968323402,
    0.11846344252809454376};

inline double quadratic(double u0, double um, double u1, double xi) {
  return u0 * (1.0 - xi) * (1.0 - 2.0 * xi) + um * 4.0 * xi * (1.0 - xi) + u1 * xi * (2.0 * xi - 1.0);
}

}  // namespace detail

/// int_0^1 integrand(x, U(x)) dx with five Gauss points per cell of the
/// solution mesh.
template <class Integrand>
double integrate(const DirichletSolution& solution, Integrand&& integrand) {
  double total = 0.0;
  const auto& x = solution.mesh.nodes;
  for (std::size_t e = 0; e + 1 < x.size(); ++e) {
    const double h = x[e + 1] - x[e];
    double cell = 0.0;
    for (std::size_t q = 0; q < detail::kGaussPoints.size(); ++q) {
      const double xi = detail::kGaussPoints[q];
      const double u = detail::quadratic(solution.values[e], solution.midpoints[e], solution.values[e + 1], xi);
      cell += detail::kGaussWeights[q] * integrand(x[e] + h * xi, u);
    }
    total += h * cell;
  }
  return total;
}

}  // namespace nlneumann
