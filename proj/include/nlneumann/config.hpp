#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlneumann/mismatch.hpp"
#include "nlneumann/nonlinearity.hpp"
#include "nlneumann/rstar.hpp"
#include "nlneumann/solver.hpp"

namespace nlneumann {

/// Reaction as written in a config: a family name plus its parameters.
/// `terms` is used by the composite family, one ReactionPart per term.
struct ReactionConfig {
  std::string family = "sinh";  // linear | sinh | odd-power | composite
  double c = 1.0;
  double p = 3.0;
  std::vector<ReactionPart> terms;

  bool operator==(const ReactionConfig&) const = default;
};

/// Flux as written in a config.
struct FluxConfig {
  std::string family = "paper-sinh";  // constant | linear-affine | paper-sinh | scaled-sqrt2F | composite
  double c = 1.0;
  double a = 0.0;
  double b = 0.0;
  double sigma = 1.0;
  double delta = 0.0;
  std::vector<FluxPart> terms;

  bool operator==(const FluxConfig&) const = default;
};

struct RunConfig {
  int dimension = 2;
  std::optional<double> epsilon;
  std::optional<double> radius;
  ReactionConfig reaction;
  FluxConfig flux;
  CheckGrid check;

  double lambda = 1.0;
  int mesh_n = 512;
  std::string grading = "layer";
  double tol = 1e-10;
  int max_newton = 200;

  double lambda_min = -10.0;
  double lambda_max = 10.0;
  int samples = 201;
  double refine_tol = 1e-8;

  std::string mode = "identity";  // identity | case1 | case2 | decay
  std::vector<double> eps_ladder{0.1, 0.05, 0.025, 0.0125};
  std::string lambda_schedule;  // empty: fixed for identity/case1/decay, inv-eps for case2
  double lambda_cap = 50.0;
  std::optional<double> M;      // empty: the reaction's coercivity constant

  double r_min = 0.5;
  double r_max = 20.0;
  double bisect_tol = 0.0;  // 0: 0.05 r_low
  std::vector<double> r_ladder{0.5, 1.0, 2.0, 5.0, 10.0, 20.0};

  bool operator==(const RunConfig&) const = default;

  /// eps from `epsilon` or 1/`radius`; ConfigError when neither is set.
  double effective_epsilon() const;
  Problem problem() const;
  ReactionTerm reaction_term() const;
  BoundaryFlux boundary_flux() const;
  SolverOptions solver_options() const;
  ScanWindow scan_window() const;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError with
/// the line number for unknown keys, duplicate keys, epsilon together with
/// radius, unknown families and malformed values.
RunConfig parse_config(const std::string& text);

/// Applies one setting on top of `config` (command-line override). Setting
/// epsilon clears radius and vice versa. `line` only labels errors.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value, int line = 0);

/// Every key with its effective value; parse_config of the result compares
/// equal to `config`.
std::string print_config(const RunConfig& config);

/// Checks that families and numeric ranges are usable; throws ConfigError.
void validate(const RunConfig& config);

}  // namespace nlneumann
