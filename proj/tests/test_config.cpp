#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nlneumann/app.hpp"
#include "nlneumann/config.hpp"
#include "nlneumann/errors.hpp"
#include "nlneumann/io.hpp"

using namespace nlneumann;
namespace fs = std::filesystem;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nlneumann_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("radius converts to epsilon") {
  const auto c = parse_config("radius=20\nf.family=sinh\ng.family=paper-sinh\ng.sigma=1\ndimension=2");
  CHECK(c.effective_epsilon() == doctest::Approx(0.05));
  CHECK(c.dimension == 2);
  CHECK(c.problem().epsilon == doctest::Approx(0.05));
  CHECK(c.boundary_flux().g(0.0) == 1.0);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("epsilon=0.1\nradius=10\n") == 2);
  CHECK(error_line("f.family=tanh") == 1);
  CHECK(error_line("# comment\n\nlambda=1\nlamda=2") == 4);
  CHECK(error_line("tol=abc") == 1);
  CHECK(error_line("mesh-n=12.5") == 1);
  CHECK(error_line("samples=10\nsamples=20") == 2);
  CHECK(error_line("just text") == 1);
  CHECK(error_line("eps-ladder=0.1,,0.05") == 1);
  CHECK(error_line("g.terms=constant:1") == 1);
  CHECK(error_line("lambda=inf") == 1);
}

TEST_CASE("missing epsilon is reported when needed") {
  const auto c = parse_config("lambda=1");
  CHECK_THROWS_AS(c.effective_epsilon(), ConfigError);
  CHECK_THROWS_AS(c.problem(), ConfigError);
}

TEST_CASE("comments and whitespace") {
  const auto c = parse_config("  epsilon = 0.25   # trailing\n# full line\n\tlambda=3\n");
  CHECK(*c.epsilon == 0.25);
  CHECK(c.lambda == 3.0);
}

TEST_CASE("overrides replace file values") {
  auto c = parse_config("radius=10\nlambda=1");
  apply_setting(c, "epsilon", "0.2");
  CHECK_FALSE(c.radius.has_value());
  CHECK(*c.epsilon == 0.2);
  apply_setting(c, "lambda", "4");
  CHECK(c.lambda == 4.0);
  CHECK_THROWS_AS(apply_setting(c, "nope", "1"), ConfigError);
}

TEST_CASE("composite terms build the right functions") {
  const auto c = parse_config(
      "epsilon=0.1\nf.family=composite\nf.terms=sinh:0.5:2; linear:1:1; odd-power:2:1:3\n"
      "g.family=composite\ng.terms=constant:1:2; linear-affine:1:3:-1; paper-sinh:0.5:-1; scaled-sqrt2F:1:0.5:0.1");
  const auto f = c.reaction_term();
  const double t = 0.7;
  CHECK(f.f(t) == doctest::Approx(0.5 * std::sinh(2.0 * t) + t + 2.0 * t * t));
  const auto g = c.boundary_flux();
  const double expected =
      2.0 + (3.0 * t - 1.0) - 0.5 * (1.0 + 4.0 * std::sinh(t / 2.0)) + 0.5 * std::sqrt(2.0 * f.F(t) + 0.01);
  CHECK(g.g(t) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("print_config round-trips") {
  std::vector<RunConfig> configs(3);
  configs[0].radius = 20.0;
  configs[1].epsilon = 0.1 / 3.0;
  configs[1].reaction.family = "composite";
  configs[1].reaction.terms = {{ReactionFamily::sinh, 0.3, 1.0 / 7.0, 3.0}, {ReactionFamily::odd_power, 1.0, 2.0, 5.5}};
  configs[1].flux.family = "composite";
  configs[1].flux.terms = {{FluxFamily::paper_sinh, 1.0, 1.0, 0.0, 0.0, -1.0, 0.0},
                           {FluxFamily::linear_affine, 0.1, 1.0, -2.0 / 3.0, 1e-300, 1.0, 0.0}};
  configs[1].M = 0.5;
  configs[1].lambda_schedule = "inv-eps";
  configs[1].eps_ladder = {0.3, 0.2, 0.1, 1.0 / 30.0};
  configs[2].grading = "uniform";
  configs[2].mode = "decay";

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int k = 0; k < 20; ++k) {
    RunConfig c;
    c.epsilon = std::fabs(u(rng)) + 1e-3;
    c.lambda = u(rng);
    c.lambda_min = u(rng);
    c.tol = std::fabs(u(rng)) * 1e-12;
    c.flux.a = u(rng);
    c.flux.b = u(rng);
    c.r_ladder = {std::fabs(u(rng)), 1e3 + std::fabs(u(rng))};
    configs.push_back(c);
  }
  for (const auto& c : configs) {
    const auto text = print_config(c);
    CAPTURE(text);
    CHECK(parse_config(text) == c);
  }
}

TEST_CASE("format_number uses 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::nan("")).empty());
}

TEST_CASE("write_atomic replaces the file and leaves no temporary") {
  TempDir dir;
  const auto p = dir.path / "out.csv";
  write_atomic(p, "a\n");
  write_atomic(p, "b\n");
  CHECK(slurp(p) == "b\n");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) files += e.is_regular_file();
  CHECK(files == 1);
  CHECK_THROWS(write_atomic(dir.path / "missing" / "x.csv", "c"));
}

TEST_CASE("csv headers") {
  const auto s = solve_dirichlet(Problem{2, 0.1, ReactionTerm::sinh()}, 1.0, SolverOptions{64});
  const auto csv = solution_csv(s);
  CHECK(csv.rfind("x,U,dU\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 66);

  std::vector<TraceRow> rows(2);
  rows[0].R = 1.0;
  rows[0].n_roots = 2;
  rows[0].roots = {0.5, 1.5};
  rows[1].R = 2.0;
  CHECK(trace_csv(rows) == "R,n_roots,roots\n1,2,0.5;1.5\n2,0,\n");

  IdentityResidual r;
  CHECK(identity_csv({r}).rfind("epsilon,lambda,lhs,integral_term,origin_term,residual\n", 0) == 0);
  RateFit fit;
  CHECK(rates_csv(fit) == "epsilon,lambda,quantity,bound\n");
}

TEST_CASE("assumption report JSON uses the documented field names") {
  const auto rep = check_assumptions(ReactionTerm::sinh(), BoundaryFlux::paper_sinh(1.0));
  const auto j = to_json(rep);
  for (const char* key : {"f_monotone", "f_zero_at_zero", "liminf_ratio_estimate", "AR_holds_on_tail", "gap_min",
                          "gap_sign_changes", "ratio_at_infinity_estimate"}) {
    CHECK(j.contains(key));
  }
  CHECK(j.size() == 7);
  CHECK(j["AR_holds_on_tail"]["holds"] == true);
}

TEST_CASE("run: scan writes both files and they parse") {
  TempDir dir;
  RunConfig c = parse_config("radius=20\nsamples=21");
  RunOutputs o;
  o.out = (dir.path / "curve.csv").string();
  o.report = (dir.path / "report.json").string();
  o.quiet = true;
  std::ostringstream out, err;
  REQUIRE(run(c, "scan", o, out, err) == kExitOk);
  const auto j = nlohmann::json::parse(slurp(o.report));
  for (const char* key :
       {"n_roots", "roots", "min_abs_phi", "phi_sign_pattern", "inconclusive_flags", "scanned_interval"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["n_roots"] == 0);
  CHECK(j["phi_sign_pattern"] == "all_negative");
  const auto csv = slurp(o.out);
  CHECK(csv.rfind("lambda,eps_dU1,g_lambda,phi\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
}

TEST_CASE("run: exit codes under fault injection") {
  TempDir dir;
  RunOutputs o;
  o.out = (dir.path / "x").string();
  o.report = (dir.path / "y").string();
  o.quiet = true;
  std::ostringstream out, err;

  CHECK(run(parse_config("epsilon=0.1\nlambda=1"), "solve", o, out, err) == kExitOk);
  CHECK(run(parse_config("epsilon=0.1\nlambda=1\ntol=1e-30"), "solve", o, out, err) == kExitSolver);
  CHECK(run(parse_config("epsilon=0.1\nlambda=1000\nf.family=sinh"), "solve", o, out, err) == kExitPrecondition);
  CHECK(run(parse_config("lambda=1"), "solve", o, out, err) == kExitPrecondition);
  CHECK(run(parse_config("epsilon=0.1\nmesh-n=8"), "solve", o, out, err) == kExitPrecondition);
  CHECK(run(parse_config("epsilon=0.1"), "bogus", o, out, err) == kExitPrecondition);
  CHECK(run(parse_config("f.family=linear\ng.family=constant\ng.c=1"), "check", o, out, err) == kExitAssumption);
  CHECK(run(parse_config("f.family=sinh\ng.family=paper-sinh"), "check", o, out, err) == kExitOk);
  CHECK(run(parse_config("mode=case2\neps-ladder=0.1,0.05"), "asym", o, out, err) == kExitPrecondition);
}
