#include "nlneumann/app.hpp"

#include <cmath>
#include <ostream>

#include "nlneumann/asymptotics.hpp"
#include "nlneumann/errors.hpp"
#include "nlneumann/io.hpp"
#include "nlneumann/mismatch.hpp"
#include "nlneumann/nonlinearity.hpp"
#include "nlneumann/parallel.hpp"
#include "nlneumann/rstar.hpp"

namespace nlneumann {

namespace {

std::string pick(const std::string& given, const char* fallback) { return given.empty() ? fallback : given; }

// Rung lambdas for the asym modes.
LambdaSchedule schedule_for(const RunConfig& c) {
  const std::string kind = !c.lambda_schedule.empty() ? c.lambda_schedule : (c.mode == "case2" ? "inv-eps" : "fixed");
  if (kind == "inv-eps") return inverse_epsilon_schedule(c.lambda_cap);
  const double lambda = c.lambda;
  return [lambda](double) { return lambda; };
}

int run_solve(const RunConfig& c, const RunOutputs& o, std::ostream& out) {
  const auto solution = solve_dirichlet(c.problem(), c.lambda, c.solver_options());
  const auto path = pick(o.out, "sol.csv");
  write_atomic(path, solution_csv(solution));
  if (!o.quiet) {
    out << "eps U'(1) = " << format_number(solution.boundary_derivative) << "  (newton "
        << solution.newton_iterations << ", residual " << solution.interior_residual_norm << ")\n"
        << "wrote " << path << "\n";
  }
  return kExitOk;
}

int run_scan(const RunConfig& c, const RunOutputs& o, std::ostream& out, std::ostream& err) {
  const auto curve =
      scan(c.problem(), c.boundary_flux(), c.lambda_min, c.lambda_max, c.samples, c.solver_options(), c.refine_tol);
  const auto report = existence_report(curve);
  const auto csv = pick(o.out, "curve.csv");
  const auto json = pick(o.report, "report.json");
  write_atomic(csv, curve_csv(curve));
  write_atomic(json, to_json(report, curve.roots).dump(2) + "\n");
  for (const auto& w : curve.warnings) err << "warning: dropped sample: " << w << "\n";
  if (!o.quiet) {
    out << "roots: " << report.n_roots << ", pattern " << to_string(report.phi_sign_pattern) << ", min |phi| "
        << format_number(report.min_abs_phi) << "\n"
        << "wrote " << csv << ", " << json << "\n";
  }
  return curve.failed_samples > 0 ? kExitSolver : kExitOk;
}

int run_asym(const RunConfig& c, const RunOutputs& o, std::ostream& out, std::ostream& err) {
  const auto path = pick(o.out, "rates.csv");
  Problem family;
  family.dimension = c.dimension;
  family.reaction = c.reaction_term();
  const auto options = c.solver_options();
  const auto schedule = schedule_for(c);

  if (c.mode == "case1" || c.mode == "case2") {
    const auto fit = c.mode == "case1" ? case1_rate(family, c.lambda, c.eps_ladder, options)
                                       : case2_ratio(family, schedule, c.eps_ladder, options);
    write_atomic(path, rates_csv(fit));
    bool failed = false;
    for (std::size_t k = 0; k < fit.failures.size(); ++k) {
      if (!fit.failures[k].empty()) {
        err << "rung eps=" << fit.epsilons[k] << ": " << fit.failures[k] << "\n";
        failed = true;
      }
    }
    if (!o.quiet) {
      out << c.mode << ": slope " << format_number(fit.fitted_slope) << ", within bounds "
          << (fit.within_bounds ? "yes" : "no") << ", monotone " << (fit.monotone ? "yes" : "no");
      if (c.mode == "case2") out << ", final ratio in [0.85, 1.15] " << (fit.final_in_range ? "yes" : "no");
      out << "\nwrote " << path << "\n";
    }
    return failed ? kExitSolver : kExitOk;
  }

  validate_ladder(c.eps_ladder);
  const std::size_t n = c.eps_ladder.size();
  std::vector<DirichletSolution> solutions(n);
  detail::parallel_for(n, [&](std::size_t k) {
    Problem rung = family;
    rung.epsilon = c.eps_ladder[k];
    solutions[k] = solve_dirichlet(rung, schedule(rung.epsilon), options);
  });

  if (c.mode == "identity") {
    std::vector<IdentityResidual> rows;
    for (const auto& s : solutions) rows.push_back(energy_identity_residual(s));
    write_atomic(path, identity_csv(rows));
    if (!o.quiet) {
      double worst = 0.0;
      for (const auto& r : rows) {
        worst = std::max(worst, std::fabs(r.residual) / (1.0 + std::fabs(c.reaction_term().F(r.lambda))));
      }
      out << "identity: max |residual| / (1 + |F(lambda)|) = " << format_number(worst) << "\nwrote " << path << "\n";
    }
    return kExitOk;
  }

  // decay: quantity is the largest excess of |U| over the envelope, bound the allowed 1e-9.
  const double M = c.M ? *c.M : family.reaction.coercivity();
  RateFit fit;
  fit.kind = "decay";
  bool all_ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    const auto report = decay_envelope(solutions[k], M);
    fit.epsilons.push_back(c.eps_ladder[k]);
    fit.lambdas.push_back(solutions[k].lambda);
    fit.quantities.push_back(report.max_decay_excess);
    fit.bounds.push_back(1e-9);
    all_ok = all_ok && report.decay_ok;
    if (!report.epsilon_in_range && !o.quiet) {
      out << "note: eps=" << c.eps_ladder[k] << " is outside the proven range eps < " << report.epsilon_limit << "\n";
    }
  }
  write_atomic(path, rates_csv(fit));
  if (!o.quiet) out << "decay: envelope holds on every rung: " << (all_ok ? "yes" : "no") << "\nwrote " << path << "\n";
  return kExitOk;
}

int run_rstar(const RunConfig& c, const RunOutputs& o, std::ostream& out, std::ostream& err) {
  Problem family;
  family.dimension = c.dimension;
  family.reaction = c.reaction_term();
  const auto est = estimate_rstar(family, c.boundary_flux(), c.scan_window(), c.r_min, c.r_max, c.bisect_tol,
                                  c.solver_options());
  const auto path = pick(o.out, "rstar.json");
  write_atomic(path, to_json(est).dump(2) + "\n");
  for (const auto& w : est.warnings) err << "warning: " << w << "\n";
  if (!o.quiet) {
    out << "status " << to_string(est.status) << ", r_low " << format_number(est.r_low) << ", r_high "
        << format_number(est.r_high) << "\nwrote " << path << "\n";
  }
  return kExitOk;
}

int run_trace(const RunConfig& c, const RunOutputs& o, std::ostream& out, std::ostream& err) {
  Problem family;
  family.dimension = c.dimension;
  family.reaction = c.reaction_term();
  const auto rows = root_trace(family, c.boundary_flux(), c.r_ladder, c.scan_window(), c.solver_options());
  const auto path = pick(o.out, "trace.csv");
  write_atomic(path, trace_csv(rows));
  bool failed = false;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      err << "R=" << row.R << ": " << row.error << "\n";
      failed = true;
    }
  }
  if (!o.quiet) {
    out << "presence transitions: " << presence_transitions(rows) << "\nwrote " << path << "\n";
  }
  return failed ? kExitSolver : kExitOk;
}

int run_check(const RunConfig& c, const RunOutputs& o, std::ostream& out) {
  const auto report = check_assumptions(c.reaction_term(), c.boundary_flux(), c.check);
  const auto path = pick(o.out, "assumptions.json");
  write_atomic(path, to_json(report).dump(2) + "\n");
  const bool holds = report.flux_condition_holds();
  if (!o.quiet) {
    out << "gap_min " << format_number(report.gap_min) << ", crossings " << report.gap_sign_changes.size()
        << ", ratio at infinity " << format_number(report.ratio_at_infinity_estimate) << "\n";
    for (const auto& x : report.gap_sign_changes) {
      out << "  g^2 - 2F changes sign in [" << format_number(x.lo) << ", " << format_number(x.hi) << "]\n";
    }
    out << "flux condition " << (holds ? "holds" : "violated") << "\nwrote " << path << "\n";
  }
  return holds ? kExitOk : kExitAssumption;
}

}  // namespace

int run(const RunConfig& config, const std::string& subcommand, const RunOutputs& outputs, std::ostream& out,
        std::ostream& err) {
  try {
    validate(config);
    if (subcommand == "solve") return run_solve(config, outputs, out);
    if (subcommand == "scan") return run_scan(config, outputs, out, err);
    if (subcommand == "asym") return run_asym(config, outputs, out, err);
    if (subcommand == "rstar") return run_rstar(config, outputs, out, err);
    if (subcommand == "trace") return run_trace(config, outputs, out, err);
    if (subcommand == "check") return run_check(config, outputs, out);
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitPrecondition;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
}

}  // namespace nlneumann
