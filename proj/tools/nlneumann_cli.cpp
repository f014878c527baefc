#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nlneumann/app.hpp"
#include "nlneumann/config.hpp"
#include "nlneumann/errors.hpp"

namespace {

using Settings = std::vector<std::pair<std::string, std::string>>;

void setting_flag(CLI::App* sub, Settings& settings, const std::string& key, const std::string& help) {
  sub->add_option_function<std::string>(
      "--" + key, [&settings, key](const std::string& value) { settings.emplace_back(key, value); }, help);
}

void problem_flags(CLI::App* sub, Settings& settings) {
  setting_flag(sub, settings, "dimension", "space dimension N >= 1");
  auto* eps = sub->add_option_function<std::string>(
      "--epsilon", [&settings](const std::string& v) { settings.emplace_back("epsilon", v); }, "epsilon = 1/R");
  auto* radius = sub->add_option_function<std::string>(
      "--radius", [&settings](const std::string& v) { settings.emplace_back("radius", v); }, "ball radius R");
  eps->excludes(radius);
  radius->excludes(eps);
}

void solver_flags(CLI::App* sub, Settings& settings) {
  setting_flag(sub, settings, "mesh-n", "number of cells (>= 32)");
  setting_flag(sub, settings, "grading", "uniform | layer");
  setting_flag(sub, settings, "tol", "Newton tolerance on the scaled residual");
  setting_flag(sub, settings, "max-newton", "Newton iteration cap");
}

void window_flags(CLI::App* sub, Settings& settings) {
  setting_flag(sub, settings, "lambda-min", "scan window start");
  setting_flag(sub, settings, "lambda-max", "scan window end");
  setting_flag(sub, settings, "samples", "samples per scan (>= 3)");
  setting_flag(sub, settings, "refine-tol", "root bracket width");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nlneumann::ConfigError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial nonlinear Neumann problem: Dirichlet solves, mismatch scans, asymptotic checks"};
  app.require_subcommand(0, 1);

  std::string config_path;
  bool print = false;
  nlneumann::RunOutputs outputs;
  long long seed = 0;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key=value config file");
  app.add_flag("--print-config", print, "print the effective config and exit");
  app.add_flag("--quiet", outputs.quiet, "no summary on stdout");
  app.add_option("--seed", seed, "reserved; every algorithm is deterministic");
  app.add_option("--set", overrides, "KEY=VALUE override, repeatable (e.g. f.family=linear)");

  Settings settings;

  auto* solve = app.add_subcommand("solve", "Dirichlet solve U(1) = lambda; writes x,U,dU");
  problem_flags(solve, settings);
  solver_flags(solve, settings);
  setting_flag(solve, settings, "lambda", "boundary value");
  solve->add_option("--out", outputs.out, "CSV path (default sol.csv)");

  auto* scan = app.add_subcommand("scan", "sample Phi(lambda) and locate its roots");
  problem_flags(scan, settings);
  solver_flags(scan, settings);
  window_flags(scan, settings);
  scan->add_option("--out", outputs.out, "CSV path (default curve.csv)");
  scan->add_option("--report", outputs.report, "JSON path (default report.json)");

  auto* asym = app.add_subcommand("asym", "energy identity, case 1/2 limits and decay along an eps ladder");
  setting_flag(asym, settings, "dimension", "space dimension N >= 1");
  solver_flags(asym, settings);
  setting_flag(asym, settings, "mode", "identity | case1 | case2 | decay");
  setting_flag(asym, settings, "eps-ladder", "comma-separated decreasing eps values");
  setting_flag(asym, settings, "lambda", "fixed boundary value");
  setting_flag(asym, settings, "lambda-schedule", "fixed | inv-eps");
  setting_flag(asym, settings, "lambda-cap", "cap of the inv-eps schedule");
  setting_flag(asym, settings, "M", "coercivity constant for the decay envelope");
  asym->add_option("--out", outputs.out, "CSV path (default rates.csv)");

  auto* rstar = app.add_subcommand("rstar", "bracket the radius beyond which the window holds no root");
  setting_flag(rstar, settings, "dimension", "space dimension N >= 1");
  solver_flags(rstar, settings);
  window_flags(rstar, settings);
  setting_flag(rstar, settings, "r-min", "smallest radius");
  setting_flag(rstar, settings, "r-max", "largest radius");
  setting_flag(rstar, settings, "bisect-tol", "bracket width on R (0: 0.05 r_low)");
  rstar->add_option("--out", outputs.out, "JSON path (default rstar.json)");

  auto* trace = app.add_subcommand("trace", "root locations along a radius ladder");
  setting_flag(trace, settings, "dimension", "space dimension N >= 1");
  solver_flags(trace, settings);
  window_flags(trace, settings);
  setting_flag(trace, settings, "r-ladder", "comma-separated increasing radii");
  trace->add_option("--out", outputs.out, "CSV path (default trace.csv)");

  auto* check = app.add_subcommand("check", "sampled check of the assumptions on f and g");
  check->add_option_function<std::string>(
      "--t-max", [&settings](const std::string& v) { settings.emplace_back("check.t_max", v); }, "grid half-width");
  check->add_option_function<std::string>(
      "--n-points", [&settings](const std::string& v) { settings.emplace_back("check.n_points", v); },
      "grid points (>= 100)");
  check->add_option_function<std::string>(
      "--tail-T", [&settings](const std::string& v) { settings.emplace_back("check.tail_T", v); },
      "tail threshold for t f >= theta0 F");
  check->add_option("--out", outputs.out, "JSON path (default assumptions.json)");

  for (auto* sub : {solve, scan, asym, rstar, trace, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return nlneumann::kExitPrecondition;
  }

  nlneumann::RunConfig config;
  try {
    if (!config_path.empty()) config = nlneumann::parse_config(read_file(config_path));
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw nlneumann::ConfigError("--set expects KEY=VALUE, got '" + item + "'");
      nlneumann::apply_setting(config, item.substr(0, eq), item.substr(eq + 1));
    }
    for (const auto& [key, value] : settings) nlneumann::apply_setting(config, key, value);
  } catch (const nlneumann::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return nlneumann::kExitPrecondition;
  }

  if (print) {
    std::cout << nlneumann::print_config(config);
    return nlneumann::kExitOk;
  }
  const auto chosen = app.get_subcommands();
  if (chosen.empty()) {
    std::cerr << app.help();
    return nlneumann::kExitPrecondition;
  }
  return nlneumann::run(config, chosen.front()->get_name(), outputs, std::cout, std::cerr);
}
