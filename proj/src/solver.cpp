#include "nlneumann/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <lapacke.h>

#include "nlneumann/errors.hpp"

namespace nlneumann {

namespace {

using detail::kGaussPoints;
using detail::kGaussWeights;

// Quadratic Lagrange basis on [0, 1] with nodes 0, 1/2, 1, and d/dxi.
struct Basis {
  std::array<double, 3> value;
  std::array<double, 3> slope;
};

constexpr Basis basis_at(double xi) {
  return {{(1.0 - xi) * (1.0 - 2.0 * xi), 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)},
          {4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0}};
}

constexpr std::array<Basis, 5> kBasis = {basis_at(kGaussPoints[0]), basis_at(kGaussPoints[1]),
                                         basis_at(kGaussPoints[2]), basis_at(kGaussPoints[3]),
                                         basis_at(kGaussPoints[4])};

double radial_weight(double x, int dimension) {
  double w = 1.0;
  for (int k = 1; k < dimension; ++k) w *= x;
  return w;
}

constexpr int kBand = 2;                         // half bandwidth of the quadratic-element system
constexpr int kLdab = 2 * kBand + kBand + 1;     // LAPACK gbsv storage rows

// Galerkin residual of  int eps^2 x^(N-1) U' v' + x^(N-1) f(U) v  for every
// basis function v, including the Dirichlet one (whose entry is eps^2 U'(1)).
struct Assembly {
  std::vector<double> residual;
  std::vector<double> magnitude;  // same integrals with absolute values
  std::vector<double> mass;       // int x^(N-1) |v|
  std::vector<double> band;       // Jacobian on the free unknowns, gbsv layout

  void assemble(const Problem& problem, const Mesh& mesh, const std::vector<double>& u, bool with_jacobian) {
    const std::size_t dofs = u.size();
    const std::size_t unknowns = dofs - 1;
    residual.assign(dofs, 0.0);
    magnitude.assign(dofs, 0.0);
    mass.assign(dofs, 0.0);
    if (with_jacobian) band.assign(kLdab * unknowns, 0.0);

    const double eps2 = problem.epsilon * problem.epsilon;
    const auto& x = mesh.nodes;
    for (std::size_t e = 0; e + 1 < x.size(); ++e) {
      const double h = x[e + 1] - x[e];
      const std::size_t first = 2 * e;
      const std::array<double, 3> local = {u[first], u[first + 1], u[first + 2]};
      std::array<double, 3> r{};
      std::array<double, 3> a{};
      std::array<double, 3> m{};
      std::array<std::array<double, 3>, 3> j{};
      for (std::size_t q = 0; q < kGaussPoints.size(); ++q) {
        const auto& phi = kBasis[q];
        const double wq = kGaussWeights[q];
        const double w = radial_weight(x[e] + h * kGaussPoints[q], problem.dimension);
        double value = 0.0;
        double slope = 0.0;
        for (int k = 0; k < 3; ++k) {
          value += local[k] * phi.value[k];
          slope += local[k] * phi.slope[k];
        }
        slope /= h;
        const double fu = problem.reaction.f(value);
        const double dfu = with_jacobian ? problem.reaction.df(value) : 0.0;
        for (int k = 0; k < 3; ++k) {
          const double diffusion = wq * eps2 * w * slope * phi.slope[k];
          const double reaction = wq * h * w * fu * phi.value[k];
          r[k] += diffusion + reaction;
          a[k] += std::fabs(diffusion) + std::fabs(reaction);
          m[k] += wq * h * w * std::fabs(phi.value[k]);
          if (with_jacobian) {
            for (int l = 0; l < 3; ++l) {
              j[k][l] += wq * w * (eps2 * phi.slope[k] * phi.slope[l] / h + h * dfu * phi.value[k] * phi.value[l]);
            }
          }
        }
      }
      for (int k = 0; k < 3; ++k) {
        residual[first + k] += r[k];
        magnitude[first + k] += a[k];
        mass[first + k] += m[k];
      }
      if (with_jacobian) {
        for (int k = 0; k < 3; ++k) {
          const std::size_t row = first + k;
          if (row >= unknowns) continue;
          for (int l = 0; l < 3; ++l) {
            const std::size_t col = first + l;
            if (col >= unknowns) continue;
            band[(2 * kBand + row - col) + col * kLdab] += j[k][l];
          }
        }
      }
    }
  }

  // Largest residual relative to the size of the terms that produced it.
  double scaled_norm() const {
    double norm = 0.0;
    for (std::size_t i = 0; i + 1 < residual.size(); ++i) {
      norm = std::max(norm, std::fabs(residual[i]) / (mass[i] + magnitude[i]));
    }
    return norm;
  }

};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::infinity();
};

// Damped Newton on the free unknowns of u (u.back() is the Dirichlet value).
NewtonResult newton(const Problem& problem, const Mesh& mesh, std::vector<double>& u, const SolverOptions& options) {
  NewtonResult result;
  const std::size_t unknowns = u.size() - 1;
  Assembly current;
  Assembly trial_assembly;
  try {
    current.assemble(problem, mesh, u, true);
  } catch (const DomainError&) {
    return result;
  }
  std::vector<double> step(unknowns);
  std::vector<double> trial(u.size());
  std::vector<double> simplified(unknowns);
  std::vector<lapack_int> pivots(unknowns);

  for (int it = 0;; ++it) {
    result.iterations = it;
    result.residual_norm = current.scaled_norm();
    if (result.residual_norm <= options.tol) {
      result.converged = true;
      return result;
    }
    if (it == options.max_newton || !std::isfinite(result.residual_norm)) return result;

    for (std::size_t i = 0; i < unknowns; ++i) step[i] = -current.residual[i];
    const lapack_int info =
        LAPACKE_dgbsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(unknowns), kBand, kBand, 1, current.band.data(),
                      kLdab, pivots.data(), step.data(), static_cast<lapack_int>(unknowns));
    if (info != 0) return result;

    // Damping on the natural level |J(u)^-1 R|: corrections are measured in
    // units of U, so rows of very different size compare fairly.
    const double level = max_abs(step);
    double damping = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving, damping *= 0.5) {
      for (std::size_t i = 0; i < unknowns; ++i) trial[i] = u[i] + damping * step[i];
      trial.back() = u.back();
      try {
        trial_assembly.assemble(problem, mesh, trial, true);
      } catch (const DomainError&) {
        continue;  // overshoot past the overflow guard
      }
      if (trial_assembly.scaled_norm() <= options.tol) {
        accepted = true;
        break;
      }
      simplified.assign(trial_assembly.residual.begin(), trial_assembly.residual.end() - 1);
      LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(unknowns), kBand, kBand, 1, current.band.data(),
                     kLdab, pivots.data(), simplified.data(), static_cast<lapack_int>(unknowns));
      if (max_abs(simplified) < level) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return result;
    u.swap(trial);
    std::swap(current, trial_assembly);
  }
}

DirichletSolution finish(const Problem& problem, double lambda, const Mesh& mesh, const std::vector<double>& u,
                         double residual_norm, int iterations, int continuation_steps) {
  DirichletSolution solution;
  solution.problem = problem;
  solution.lambda = lambda;
  solution.mesh = mesh;
  const std::size_t n = mesh.cells();
  solution.values.resize(n + 1);
  solution.midpoints.resize(n);
  for (std::size_t i = 0; i <= n; ++i) solution.values[i] = u[2 * i];
  for (std::size_t e = 0; e < n; ++e) solution.midpoints[e] = u[2 * e + 1];
  solution.values[n] = lambda;

  Assembly assembly;
  assembly.assemble(problem, mesh, u, false);
  solution.boundary_derivative = assembly.residual.back() / problem.epsilon;
  solution.interior_residual_norm = residual_norm;
  solution.newton_iterations = iterations;
  solution.continuation_steps = continuation_steps;

  // eps U' at nodes from the integrated equation
  //   eps^2 x^(N-1) U'(x) = int_0^x s^(N-1) f(U(s)) ds,
  // the Galerkin flux at x = 1.
  const double eps = problem.epsilon;
  const int dim = problem.dimension;
  solution.slopes.assign(n + 1, 0.0);
  double flux = 0.0;
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double h = mesh.cell(e);
    double cell = 0.0;
    for (std::size_t q = 0; q < detail::kGaussPoints.size(); ++q) {
      const double xi = detail::kGaussPoints[q];
      const double x = mesh.nodes[e] + h * xi;
      const double v = detail::quadratic(u[2 * e], u[2 * e + 1], u[2 * e + 2], xi);
      cell += detail::kGaussWeights[q] * std::pow(x, dim - 1) * problem.reaction.f(v);
    }
    flux += h * cell;
    solution.slopes[e + 1] = flux / (eps * std::pow(mesh.nodes[e + 1], dim - 1));
  }
  solution.slopes[n] = solution.boundary_derivative;
  return solution;
}

void check_mesh(const Mesh& mesh) {
  if (mesh.nodes.size() < 3 || mesh.nodes.front() != 0.0 || mesh.nodes.back() != 1.0) {
    throw PreconditionError("mesh must span [0, 1] with at least two cells");
  }
  for (std::size_t i = 0; i + 1 < mesh.nodes.size(); ++i) {
    if (!(mesh.nodes[i + 1] > mesh.nodes[i])) throw PreconditionError("mesh nodes must be strictly increasing");
  }
}

}  // namespace

void validate(const Problem& problem) {
  if (problem.dimension < 1) throw PreconditionError("dimension N must be >= 1");
  if (!(problem.epsilon > 0.0) || !std::isfinite(problem.epsilon)) {
    throw PreconditionError("epsilon must be positive and finite");
  }
}

double DirichletSolution::eval(double x) const {
  const auto& nodes = mesh.nodes;
  if (x <= 0.0) return values.front();
  if (x >= 1.0) return values.back();
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const std::size_t e = static_cast<std::size_t>(it - nodes.begin()) - 1;
  const double xi = (x - nodes[e]) / (nodes[e + 1] - nodes[e]);
  return detail::quadratic(values[e], midpoints[e], values[e + 1], xi);
}

GradingSpec adapted_grading(const Problem& problem, double lambda, Grading kind) {
  GradingSpec grading;
  grading.kind = kind;
  if (kind == Grading::uniform) return grading;
  const double stiffness = std::max(problem.reaction.df(lambda), problem.reaction.df(0.0));
  grading.fraction = 0.75;
  grading.min_cell = stiffness > 0.0 ? 0.01 * problem.epsilon / std::sqrt(stiffness) : 0.0;
  return grading;
}

DirichletSolution solve_dirichlet(const Problem& problem, double lambda, const SolverOptions& options,
                                  const Mesh& mesh) {
  validate(problem);
  check_mesh(mesh);
  if (!(options.tol > 0.0)) throw PreconditionError("solver tolerance must be positive");
  problem.reaction.f(lambda);  // overflow guard on the boundary datum

  const std::size_t dofs = 2 * mesh.cells() + 1;
  std::vector<double> u(dofs, 0.0);
  u.back() = lambda;
  if (lambda == 0.0) return finish(problem, lambda, mesh, u, 0.0, 0, 0);

  auto attempt = newton(problem, mesh, u, options);
  if (attempt.converged) return finish(problem, lambda, mesh, u, attempt.residual_norm, attempt.iterations, 0);
  double last_residual = attempt.residual_norm;

  if (options.continuation) {
    std::vector<double> ladder;
    for (double eps = std::max(1.0, 10.0 * problem.epsilon); eps > problem.epsilon; eps *= 0.5) ladder.push_back(eps);
    ladder.push_back(problem.epsilon);

    std::fill(u.begin(), u.end(), 0.0);
    u.back() = lambda;
    int total_iterations = attempt.iterations;
    bool ok = true;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      Problem rung = problem;
      rung.epsilon = ladder[k];
      const auto result = newton(rung, mesh, u, options);
      total_iterations += result.iterations;
      last_residual = result.residual_norm;
      if (!result.converged) {
        ok = false;
        break;
      }
    }
    if (ok) {
      return finish(problem, lambda, mesh, u, last_residual, total_iterations, static_cast<int>(ladder.size()));
    }

    // Boundary-datum continuation: the inner layer of exponential reactions
    // shrinks like exp(-|lambda|/2) at every eps, so only growing lambda
    // itself keeps Newton inside its basin.
    std::fill(u.begin(), u.end(), 0.0);
    std::vector<double> accepted = u;
    double reached = 0.0;
    double increment = lambda;
    int steps = 0;
    total_iterations = 0;
    while (reached != lambda) {
      if (std::fabs(increment) < 1e-8 * std::fabs(lambda) || steps > 400) break;
      const double target = std::fabs(increment) >= std::fabs(lambda - reached) ? lambda : reached + increment;
      u = accepted;
      u.back() = target;
      const auto result = newton(problem, mesh, u, options);
      total_iterations += result.iterations;
      last_residual = result.residual_norm;
      ++steps;
      if (result.converged) {
        accepted = u;
        reached = target;
        increment *= 1.5;
      } else {
        increment *= 0.5;
      }
    }
    if (reached == lambda) {
      return finish(problem, lambda, mesh, accepted, last_residual, total_iterations, steps);
    }
  }

  std::ostringstream msg;
  msg << "Newton did not converge for N=" << problem.dimension << ", eps=" << problem.epsilon
      << ", lambda=" << lambda << " (last scaled residual " << last_residual << ", tol " << options.tol << ")";
  throw SolverError(msg.str(), last_residual);
}

DirichletSolution solve_dirichlet(const Problem& problem, double lambda, const Mesh& mesh, double tol) {
  SolverOptions options;
  options.tol = tol;
  return solve_dirichlet(problem, lambda, options, mesh);
}

DirichletSolution solve_dirichlet(const Problem& problem, double lambda, const SolverOptions& options) {
  validate(problem);
  const Mesh mesh = build_mesh(problem.epsilon, options.mesh_n, adapted_grading(problem, lambda, options.grading));
  return solve_dirichlet(problem, lambda, options, mesh);
}

double boundary_derivative(const DirichletSolution& solution) { return solution.boundary_derivative; }

BoundReport verify_comparison(const DirichletSolution& solution, double M) {
  const double lambda = solution.lambda;
  if (lambda == 0.0) throw PreconditionError("comparison check needs lambda != 0");
  if (!(M > 0.0)) throw PreconditionError("comparison check needs M > 0");

  const int N = solution.problem.dimension;
  const double eps = solution.problem.epsilon;
  BoundReport report;
  // Two admissible ranges appear for the decay estimate; M/(sqrt2 (N-1)) is
  // the smaller, so it is the binding one.
  if (N == 1) {
    report.epsilon_limit = std::numeric_limits<double>::infinity();
    report.epsilon_limit_source = "none (N = 1)";
  } else {
    const double weak = M / (std::sqrt(2.0) * (N - 1));
    const double strong = std::sqrt(2.0) * M / (N - 1);
    report.epsilon_limit = std::min(weak, strong);
    report.epsilon_limit_source = "M/(sqrt(2)(N-1))";
  }
  report.epsilon_in_range = eps < report.epsilon_limit;

  const double slack = 1e-10 * (1.0 + std::fabs(lambda));
  const double lo = std::min(0.0, lambda);
  const double hi = std::max(0.0, lambda);
  const auto& x = solution.mesh.nodes;
  const auto& u = solution.values;
  double box = 0.0;
  double monotone = 0.0;
  double excess = -std::numeric_limits<double>::infinity();
  bool strong_ok = true;
  for (std::size_t i = 0; i < u.size(); ++i) {
    box = std::max({box, lo - u[i], u[i] - hi});
    if (i > 0) monotone = std::max(monotone, -(lambda > 0.0 ? u[i] - u[i - 1] : u[i - 1] - u[i]));
    const double weak_envelope = 2.0 * std::fabs(lambda) * std::exp(-M * (1.0 - x[i]) / (4.0 * eps));
    const double strong_envelope = 2.0 * std::fabs(lambda) * std::exp(-M * (1.0 - x[i]) / eps);
    excess = std::max(excess, std::fabs(u[i]) - weak_envelope);
    if (std::fabs(u[i]) > strong_envelope + 1e-9) strong_ok = false;
  }
  report.max_box_violation = box;
  report.max_monotonicity_violation = monotone;
  report.max_decay_excess = excess;
  report.box_ok = box <= slack;
  report.monotonicity_ok = monotone <= slack;
  report.decay_ok = excess <= 1e-9;
  report.decay_strong_ok = strong_ok;
  return report;
}

}  // namespace nlneumann
