#include <doctest.h>

#include <cmath>
#include <random>

#include "nlneumann/asymptotics.hpp"
#include "nlneumann/errors.hpp"

using namespace nlneumann;

namespace {

const std::vector<double> kLadder{0.1, 0.05, 0.025, 0.0125};

}  // namespace

TEST_CASE("identity at lambda = 0 is identically zero") {
  const auto r = energy_identity_residual(solve_dirichlet(Problem{2, 0.1, ReactionTerm::sinh()}, 0.0));
  CHECK(r.lhs == 0.0);
  CHECK(r.integral_term == 0.0);
  CHECK(r.origin_term == 0.0);
  CHECK(r.residual == 0.0);
}

TEST_CASE("identity for N = 1 linear matches the first integral") {
  const auto s = solve_dirichlet(Problem{1, 0.1, ReactionTerm::linear(1.0)}, 1.0);
  const auto r = energy_identity_residual(s);
  const double t = std::tanh(10.0);
  const double c = std::cosh(10.0);
  CHECK(r.lhs == doctest::Approx((t * t - 1.0) / 2.0).epsilon(1e-6));
  CHECK(r.origin_term == doctest::Approx(1.0 / (2.0 * c * c)).epsilon(1e-6));
  CHECK(r.integral_term == 0.0);
  CHECK(std::fabs(r.residual) <= 1e-10);
}

TEST_CASE("identity for N = 2 sinh") {
  const auto s = solve_dirichlet(Problem{2, 0.05, ReactionTerm::sinh()}, 1.0);
  const auto r = energy_identity_residual(s);
  CHECK(std::fabs(r.residual) <= 1e-8 * (1.0 + s.problem.reaction.F(1.0)));
  CHECK(r.integral_term > 0.0);
}

TEST_CASE("identity holds on random converged solves") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> lam(-6.0, 6.0);
  std::uniform_real_distribution<double> log_eps(std::log(0.015), std::log(0.5));
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int k = 0; k < 30; ++k) {
    const int which = kind(rng);
    const ReactionTerm reaction = which == 0   ? ReactionTerm::sinh()
                                  : which == 1 ? ReactionTerm::linear(2.0)
                                               : ReactionTerm::odd_power(3.0);
    const Problem p{dim(rng), std::exp(log_eps(rng)), reaction};
    const double lambda = lam(rng);
    SolverOptions o;
    o.mesh_n = 256;
    const auto r = energy_identity_residual(solve_dirichlet(p, lambda, o));
    CAPTURE(p.dimension);
    CAPTURE(p.epsilon);
    CAPTURE(lambda);
    CAPTURE(which);
    REQUIRE(std::fabs(r.residual) <= 1e-8 * (1.0 + std::fabs(reaction.F(lambda))));
  }
}

TEST_CASE("N = 1 first integral is constant across nodes") {
  const ReactionTerm f = ReactionTerm::sinh();
  auto spread = [&](int n) {
    SolverOptions o;
    o.mesh_n = n;
    const auto s = solve_dirichlet(Problem{1, 0.1, f}, 2.0, o);
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double e = 0.5 * s.slopes[i] * s.slopes[i] - f.F(s.values[i]);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    return hi - lo;
  };
  const double coarse = spread(128);
  const double fine = spread(256);
  CHECK(fine < 1e-8);
  CHECK(std::log2(coarse / fine) >= 3.5);
}

TEST_CASE("boundary energy ratio of the linear N = 1 solve is tanh^2") {
  const auto s = solve_dirichlet(Problem{1, 0.5, ReactionTerm::linear(1.0)}, 1.0);
  CHECK(boundary_energy_ratio(s) == doctest::Approx(std::pow(std::tanh(2.0), 2)).epsilon(1e-9));
  CHECK_THROWS_AS(boundary_energy_ratio(solve_dirichlet(s.problem, 0.0)), PreconditionError);
}

TEST_CASE("case 1: sinh, N = 2, lambda = 1") {
  const auto fit = case1_rate(Problem{2, 0.1, ReactionTerm::sinh()}, 1.0, kLadder);
  REQUIRE(fit.quantities.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(fit.quantities[k] > 0.0);
    CHECK(fit.bounds[k] == doctest::Approx(2.0 * std::sinh(1.0) * kLadder[k]));
    CHECK(fit.quantities[k] <= fit.bounds[k]);
  }
  CHECK(fit.monotone);
  CHECK(fit.within_bounds);
  CHECK(fit.slope_checked);
  CHECK(fit.fitted_slope >= 0.7);
  CHECK(fit.fitted_slope <= 1.3);
  CHECK(fit.all_ok());
}

TEST_CASE("case 1: linear N = 1 is exponentially small") {
  const auto fit = case1_rate(Problem{1, 0.1, ReactionTerm::linear(1.0)}, 1.0, {0.2, 0.1, 0.05, 0.025});
  for (std::size_t k = 0; k < 4; ++k) {
    const double c = std::cosh(1.0 / fit.epsilons[k]);
    CHECK(std::fabs(fit.quantities[k] - 1.0 / (2.0 * c * c)) <= 1e-10);
    CHECK(fit.quantities[k] < 1e-3 * fit.bounds[k] + 1e-12);
  }
  CHECK_FALSE(fit.slope_checked);
}

TEST_CASE("case 1 preconditions") {
  const Problem p{2, 0.1, ReactionTerm::sinh()};
  CHECK_THROWS_AS(case1_rate(p, 0.0, kLadder), PreconditionError);
  CHECK_THROWS_AS(case1_rate(p, 1.0, {0.1, 0.05, 0.025}), PreconditionError);
  CHECK_THROWS_AS(case1_rate(p, 1.0, {0.1, 0.05, 0.05, 0.01}), PreconditionError);
  CHECK_THROWS_AS(case1_rate(Problem{2, 0.1, ReactionTerm::odd_power(3.0)}, 1.0, kLadder), PreconditionError);
}

TEST_CASE("case 2: ratios approach one under lambda = 1/eps") {
  const auto fit = case2_ratio(Problem{2, 0.1, ReactionTerm::sinh()}, inverse_epsilon_schedule(), kLadder);
  CHECK(fit.lambdas == std::vector<double>{10.0, 20.0, 40.0, 50.0});
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(fit.quantities[k] <= 1.0 + 1e-6);
    CHECK(std::fabs(1.0 - fit.quantities[k]) <= 4.0 * kLadder[k] + 1e-6);
    if (k > 0) CHECK(fit.quantities[k] >= fit.quantities[k - 1] - 1e-6);
  }
  CHECK(fit.final_in_range);
  CHECK(fit.all_ok());
}

TEST_CASE("case 2: linear N = 1 ratio is tanh^2(1/eps)") {
  const auto fit = case2_ratio(Problem{1, 0.1, ReactionTerm::linear(1.0)}, [](double eps) { return 0.1 / eps; },
                               {0.5, 0.25, 0.125, 0.0625});
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(fit.quantities[k] == doctest::Approx(std::pow(std::tanh(1.0 / fit.epsilons[k]), 2)).epsilon(1e-8));
  }
}

TEST_CASE("case 2 rejects schedules that do not grow") {
  const Problem p{2, 0.1, ReactionTerm::sinh()};
  CHECK_THROWS_AS(case2_ratio(p, [](double) { return 1.0; }, kLadder), PreconditionError);
  CHECK_THROWS_AS(case2_ratio(p, inverse_epsilon_schedule(5.0), kLadder), PreconditionError);
  CHECK_THROWS_AS(case2_ratio(p, [](double e) { return 1000.0 / e; }, kLadder), DomainError);
}

TEST_CASE("decay envelope examples") {
  CHECK(decay_envelope(solve_dirichlet(Problem{2, 0.05, ReactionTerm::sinh()}, 2.0), 1.0).decay_ok);
  CHECK(decay_envelope(solve_dirichlet(Problem{2, 0.02, ReactionTerm::sinh()}, 0.5), 1.0).decay_ok);
  CHECK_THROWS_AS(decay_envelope(solve_dirichlet(Problem{2, 0.02, ReactionTerm::sinh()}, 0.0), 1.0),
                  PreconditionError);
}
