#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <string>

#include "nlneumann/errors.hpp"
#include "nlneumann/nonlinearity.hpp"

using namespace nlneumann;

namespace {

// Taylor series in long double, independent of the library's expm1 forms.
double sinh_series(double t) {
  long double term = t;
  long double sum = 0.0L;
  for (int k = 1; k < 60; ++k) {
    sum += term;
    term *= static_cast<long double>(t) * t / ((2.0L * k) * (2.0L * k + 1.0L));
  }
  return static_cast<double>(sum);
}

double cosh_m1_series(double t) {
  long double term = static_cast<long double>(t) * t / 2.0L;
  long double sum = 0.0L;
  for (int k = 1; k < 60; ++k) {
    sum += term;
    term *= static_cast<long double>(t) * t / ((2.0L * k + 1.0L) * (2.0L * k + 2.0L));
  }
  return static_cast<double>(sum);
}

// Tanh-sinh quadrature of f over [0, t].
double F_oracle(const ReactionTerm& r, double t) {
  if (t == 0.0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double a = std::min(0.0, t);
  const double b = std::max(0.0, t);
  const double v = integrator.integrate([&](double s) { return r.f(s); }, a, b, 1e-14);
  return t > 0.0 ? v : -v;
}

std::vector<ReactionTerm> catalog() {
  return {ReactionTerm::linear(1.0),
          ReactionTerm::linear(2.5),
          ReactionTerm::sinh(),
          ReactionTerm::odd_power(3.0),
          ReactionTerm::odd_power(2.5),
          ReactionTerm::composite({{ReactionFamily::sinh, 0.5, 0.8, 3.0},
                                   {ReactionFamily::linear, 2.0, 1.0, 3.0},
                                   {ReactionFamily::odd_power, 1.0, 0.5, 4.0}})};
}

}  // namespace

TEST_CASE("eval_f on the catalog examples") {
  CHECK(eval_f(ReactionTerm::linear(1.0), 2.0) == 2.0);
  CHECK(eval_f(ReactionTerm::sinh(), 0.0) == 0.0);
  CHECK(eval_f(ReactionTerm::sinh(), 1.0) == doctest::Approx(sinh_series(1.0)).epsilon(1e-15));
  CHECK(eval_f(ReactionTerm::sinh(), 1.0) == doctest::Approx(1.1752011936438014).epsilon(1e-15));
}

TEST_CASE("eval_F on the catalog examples") {
  CHECK(eval_F(ReactionTerm::linear(1.0), 2.0) == 2.0);
  CHECK(eval_F(ReactionTerm::sinh(), 0.0) == 0.0);
  CHECK(eval_F(ReactionTerm::sinh(), 1.0) == doctest::Approx(cosh_m1_series(1.0)).epsilon(1e-15));
  CHECK(eval_F(ReactionTerm::sinh(), 1.0) == doctest::Approx(F_oracle(ReactionTerm::sinh(), 1.0)).epsilon(1e-13));
  CHECK(eval_F(ReactionTerm::odd_power(3.0), -2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("sinh primitive keeps relative precision near zero") {
  for (double t : {1e-8, 1e-5, -3e-4, 0.01}) {
    CHECK(eval_F(ReactionTerm::sinh(), t) == doctest::Approx(cosh_m1_series(t)).epsilon(1e-14));
    CHECK(eval_f(ReactionTerm::sinh(), t) == doctest::Approx(sinh_series(t)).epsilon(1e-15));
  }
}

TEST_CASE("eval_g on the catalog examples") {
  CHECK(eval_g(BoundaryFlux::constant(1.0), 5.0) == 1.0);
  CHECK(eval_g(BoundaryFlux::paper_sinh(1.0), 0.0) == 1.0);
  CHECK(eval_g(BoundaryFlux::paper_sinh(1.0), 2.0) == doctest::Approx(1.0 + 4.0 * sinh_series(1.0)).epsilon(1e-15));
  CHECK(eval_g(BoundaryFlux::paper_sinh(1.0), 2.0) == doctest::Approx(5.7008047745752057).epsilon(1e-14));
  CHECK(eval_g(BoundaryFlux::paper_sinh(-1.0), -2.0) == doctest::Approx(-5.7008047745752057).epsilon(1e-14));
  CHECK(eval_g(BoundaryFlux::linear_affine(-1.0, 0.5), 2.0) == -1.5);
  const auto s = BoundaryFlux::scaled_sqrt2F(2.0, 0.0, ReactionTerm::linear(1.0));
  CHECK(eval_g(s, -3.0) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("overflow guard names its bound") {
  const auto r = ReactionTerm::sinh();
  CHECK(r.overflow_bound() == 700.0);
  CHECK_THROWS_AS(eval_f(r, 701.0), DomainError);
  CHECK_THROWS_AS(eval_F(r, -800.0), DomainError);
  CHECK_THROWS_AS(eval_g(BoundaryFlux::paper_sinh(1.0), 2000.0), DomainError);
  CHECK_THROWS_AS(eval_f(r, std::nan("")), DomainError);
  try {
    eval_f(r, 1000.0);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("700") != std::string::npos);
  }
}

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(ReactionTerm::linear(0.0), PreconditionError);
  CHECK_THROWS_AS(ReactionTerm::odd_power(1.0), PreconditionError);
  CHECK_THROWS_AS(ReactionTerm::composite({}), PreconditionError);
  CHECK_THROWS_AS(BoundaryFlux::paper_sinh(0.5), PreconditionError);
  CHECK_THROWS_AS(BoundaryFlux::composite({{FluxFamily::scaled_sqrt2F}}), PreconditionError);
}

TEST_CASE("growth constants") {
  CHECK(ReactionTerm::sinh().coercivity() == 1.0);
  CHECK(ReactionTerm::linear(1.0).coercivity() == 1.0);
  CHECK(ReactionTerm::linear(3.0).coercivity() == 3.0);
  CHECK(ReactionTerm::odd_power(3.0).coercivity() == 0.0);
  CHECK(ReactionTerm::linear(1.0).theta0() == 2.0);
  CHECK(ReactionTerm::odd_power(4.0).theta0() == 4.0);
  CHECK_FALSE(ReactionTerm::sinh().theta0().has_value());
}

TEST_CASE("closed-form F matches quadrature of f at random points") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (const auto& r : catalog()) {
    CAPTURE(r.describe());
    for (int k = 0; k < 1000; ++k) {
      const double t = dist(rng);
      const double exact = F_oracle(r, t);
      REQUIRE(std::fabs(eval_F(r, t) - exact) <= 1e-10 * std::fabs(exact));
    }
  }
}

TEST_CASE("library quadrature route agrees with the closed forms") {
  for (const auto& r : catalog()) {
    for (double t : {-7.5, -0.3, 0.0, 1e-3, 2.0, 12.0}) {
      const double exact = eval_F(r, t);
      CHECK(std::fabs(primitive_by_quadrature(r, t) - exact) <= 1e-12 + 1e-10 * std::fabs(exact));
    }
  }
}

TEST_CASE("f is strictly increasing on random pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (const auto& r : catalog()) {
    for (int k = 0; k < 1000; ++k) {
      double a = dist(rng);
      double b = dist(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      REQUIRE(r.f(a) < r.f(b));
    }
  }
}

TEST_CASE("coercivity t f(t) >= M t^2 on a grid") {
  for (const auto& r : catalog()) {
    const double M = r.coercivity();
    for (int i = -2000; i <= 2000; ++i) {
      const double t = 0.025 * i;
      REQUIRE(t * r.f(t) - M * t * t >= -1e-15 * t * t);
    }
  }
}

TEST_CASE("paper-sinh gap g^2 - 2F equals 1 + 8 s + 12 s^2 with s = sinh(|t|/2)") {
  const auto r = ReactionTerm::sinh();
  const auto g = BoundaryFlux::paper_sinh(1.0);
  for (int i = -1000; i <= 1000; ++i) {
    const double t = 0.05 * i;
    const double gap = g.g(t) * g.g(t) - 2.0 * r.F(t);
    const double sh = sinh_series(std::fabs(t) / 2.0);
    const double expected = 1.0 + 8.0 * sh + 12.0 * sh * sh;
    REQUIRE(gap == doctest::Approx(expected).epsilon(1e-9));
    REQUIRE(gap >= 1.0);
  }
}

TEST_CASE("odd families are exactly odd with even primitives") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 50.0);
  for (const auto& r : catalog()) {
    for (int k = 0; k < 200; ++k) {
      const double t = dist(rng);
      REQUIRE(r.f(-t) == -r.f(t));
      REQUIRE(r.F(-t) == r.F(t));
      REQUIRE(r.df(-t) == r.df(t));
    }
    CHECK(r.f(0.0) == 0.0);
    CHECK(r.F(0.0) == 0.0);
  }
}

TEST_CASE("check_assumptions: sinh with the paper-sinh flux") {
  CheckGrid grid;
  grid.t_max = 50.0;
  const auto rep = check_assumptions(ReactionTerm::sinh(), BoundaryFlux::paper_sinh(1.0), grid);
  CHECK(rep.f_monotone);
  CHECK(rep.f_zero_at_zero);
  CHECK(rep.liminf_ratio_estimate == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.gap_min >= 1.0);
  CHECK(rep.gap_sign_changes.empty());
  CHECK(rep.ratio_at_infinity_estimate == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(rep.AR_holds_on_tail.holds);
  CHECK(rep.AR_holds_on_tail.theta0 > 1.0);
  CHECK(rep.positive_branch_condition);
  CHECK(rep.flux_condition_holds());
}

TEST_CASE("check_assumptions: linear f with constant g crosses at +-1") {
  CheckGrid grid;
  grid.t_max = 5.0;
  grid.tail_T = 2.0;
  const auto rep = check_assumptions(ReactionTerm::linear(1.0), BoundaryFlux::constant(1.0), grid);
  REQUIRE(rep.gap_sign_changes.size() == 2);
  const auto& neg = rep.gap_sign_changes[0];
  const auto& pos = rep.gap_sign_changes[1];
  CHECK(neg.lo <= -1.0);
  CHECK(neg.hi >= -1.0);
  CHECK(pos.lo <= 1.0);
  CHECK(pos.hi >= 1.0);
  CHECK(neg.hi - neg.lo <= 1e-10);
  CHECK(pos.hi - pos.lo <= 1e-10);
  CHECK_FALSE(rep.flux_condition_holds());
}

TEST_CASE("check_assumptions: a flux vanishing at zero crosses there") {
  const auto rep = check_assumptions(ReactionTerm::sinh(), BoundaryFlux::linear_affine(-1.0, 0.0));
  REQUIRE_FALSE(rep.gap_sign_changes.empty());
  bool near_zero = false;
  for (const auto& c : rep.gap_sign_changes) near_zero = near_zero || (c.lo <= 1e-9 && c.hi >= -1e-9);
  CHECK(near_zero);
  CHECK(rep.gap_min == 0.0);
}

TEST_CASE("check_assumptions: crossings imply a failed flux condition") {
  const std::vector<BoundaryFlux> fluxes = {BoundaryFlux::paper_sinh(1.0), BoundaryFlux::paper_sinh(-1.0),
                                            BoundaryFlux::constant(1.0), BoundaryFlux::constant(-0.2),
                                            BoundaryFlux::linear_affine(2.0, 1.0)};
  for (const auto& r : catalog()) {
    for (const auto& g : fluxes) {
      CheckGrid grid;
      grid.t_max = 20.0;
      grid.tail_T = 5.0;
      const auto rep = check_assumptions(r, g, grid);
      if (!rep.gap_sign_changes.empty()) CHECK_FALSE(rep.flux_condition_holds());
      if (rep.gap_min > 0.5) CHECK(rep.gap_sign_changes.empty());
    }
  }
}

TEST_CASE("check_assumptions preconditions") {
  CheckGrid grid;
  grid.t_max = 5.0;
  grid.tail_T = 5.0;
  CHECK_THROWS_AS(check_assumptions(ReactionTerm::sinh(), BoundaryFlux::constant(1.0), grid), PreconditionError);
  grid.tail_T = 1.0;
  grid.n_points = 99;
  CHECK_THROWS_AS(check_assumptions(ReactionTerm::sinh(), BoundaryFlux::constant(1.0), grid), PreconditionError);
}
