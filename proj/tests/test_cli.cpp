#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(NLNEUMANN_CLI) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("solve writes x,U,dU") {
  REQUIRE(cli("solve --epsilon 0.1 --lambda 1 --mesh-n 64 --out cli_sol.csv") == 0);
  const auto csv = slurp("cli_sol.csv");
  CHECK(csv.rfind("x,U,dU\n", 0) == 0);
  CHECK(csv.find("\n1,1,0.99") != std::string::npos);
}

TEST_CASE("scan writes curve and report") {
  REQUIRE(cli("scan --radius 20 --samples 21 --out cli_curve.csv --report cli_report.json") == 0);
  const auto j = nlohmann::json::parse(slurp("cli_report.json"));
  CHECK(j["n_roots"] == 0);
  CHECK(slurp("cli_curve.csv").rfind("lambda,eps_dU1,g_lambda,phi\n", 0) == 0);
}

TEST_CASE("exit codes") {
  CHECK(cli("solve --epsilon 0.1 --lambda 1 --tol 1e-30 --out cli_x.csv") == 2);
  CHECK(cli("solve --epsilon 0.1 --lambda 1000 --out cli_x.csv") == 3);
  CHECK(cli("--set f.family=linear --set g.family=constant --set g.c=1 check --out cli_check.json") == 4);
  const auto j = nlohmann::json::parse(slurp("cli_check.json"));
  CHECK(j["gap_sign_changes"].size() == 2);
  CHECK(cli("solve --epsilon 0.1 --radius 10") == 3);
  CHECK(cli("solve --no-such-flag") == 3);
  CHECK(cli("--set unknown.key=1 solve --epsilon 0.1") == 3);
  CHECK(cli("--help") == 0);
  CHECK(cli("") == 3);
}

TEST_CASE("config file, overrides and print-config round-trip") {
  {
    std::ofstream cfg("cli_run.cfg");
    cfg << "# paper example\nradius=20\nf.family=sinh\ng.family=paper-sinh\ng.sigma=1\ndimension=2\n";
  }
  REQUIRE(cli("--config cli_run.cfg --print-config") == 0);
  const auto first = slurp("cli_stdout.txt");
  CHECK(first.find("radius = 20") != std::string::npos);
  {
    std::ofstream cfg("cli_printed.cfg");
    cfg << first;
  }
  REQUIRE(cli("--config cli_printed.cfg --print-config") == 0);
  CHECK(slurp("cli_stdout.txt") == first);

  REQUIRE(cli("--config cli_run.cfg --print-config solve --epsilon 0.5") == 0);
  const auto over = slurp("cli_stdout.txt");
  CHECK(over.find("epsilon = 0.5") != std::string::npos);
  CHECK(over.find("radius") == std::string::npos);

  {
    std::ofstream cfg("cli_bad.cfg");
    cfg << "epsilon=0.1\nradius=10\n";
  }
  CHECK(cli("--config cli_bad.cfg solve") == 3);
  CHECK(slurp("cli_stderr.txt").find("line 2") != std::string::npos);
}

TEST_CASE("trace and asym outputs") {
  REQUIRE(cli("--set f.family=linear --set g.family=constant --set dimension=1 trace --r-ladder 1,2 "
              "--lambda-min 0 --lambda-max 5 --samples 11 --out cli_trace.csv") == 0);
  const auto trace = slurp("cli_trace.csv");
  CHECK(trace.rfind("R,n_roots,roots\n1,1,1.31303528", 0) == 0);
  REQUIRE(cli("asym --mode case1 --lambda 1 --out cli_rates.csv") == 0);
  CHECK(slurp("cli_rates.csv").rfind("epsilon,lambda,quantity,bound\n", 0) == 0);
  REQUIRE(cli("asym --mode identity --lambda 2 --out cli_id.csv") == 0);
  CHECK(slurp("cli_id.csv").rfind("epsilon,lambda,lhs,integral_term,origin_term,residual\n", 0) == 0);
  CHECK(cli("--quiet asym --mode case2 --out cli_c2.csv") == 0);
  CHECK(slurp("cli_stdout.txt").empty());
}

TEST_CASE("rstar writes its report") {
  REQUIRE(cli("--set f.family=linear --set g.family=constant --set dimension=1 rstar --lambda-min 0 "
              "--lambda-max 5 --samples 11 --r-max 5 --out cli_rstar.json") == 0);
  const auto j = nlohmann::json::parse(slurp("cli_rstar.json"));
  CHECK(j["status"] == "root_persists_to_Rmax");
  CHECK(j["scan_window"][0] == 0.0);
}
