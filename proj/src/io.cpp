#include "nlneumann/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace nlneumann {

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw std::runtime_error("write to " + temp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

std::string format_number(double value) {
  if (std::isnan(value)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string solution_csv(const DirichletSolution& s) {
  std::string out = "x,U,dU\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    out += format_number(s.mesh.nodes[i]) + "," + format_number(s.values[i]) + "," + format_number(s.slopes[i]) + "\n";
  }
  return out;
}

std::string curve_csv(const MismatchCurve& curve) {
  std::string out = "lambda,eps_dU1,g_lambda,phi\n";
  for (const auto& s : curve.samples) {
    out += format_number(s.lambda) + "," + format_number(s.eps_dU1) + "," + format_number(s.g_lambda) + "," +
           format_number(s.phi) + "\n";
  }
  return out;
}

std::string rates_csv(const RateFit& fit) {
  std::string out = "epsilon,lambda,quantity,bound\n";
  for (std::size_t k = 0; k < fit.epsilons.size(); ++k) {
    out += format_number(fit.epsilons[k]) + "," + format_number(fit.lambdas[k]) + "," +
           format_number(fit.quantities[k]) + "," + format_number(fit.bounds[k]) + "\n";
  }
  return out;
}

std::string identity_csv(const std::vector<IdentityResidual>& rows) {
  std::string out = "epsilon,lambda,lhs,integral_term,origin_term,residual\n";
  for (const auto& r : rows) {
    out += format_number(r.epsilon) + "," + format_number(r.lambda) + "," + format_number(r.lhs) + "," +
           format_number(r.integral_term) + "," + format_number(r.origin_term) + "," + format_number(r.residual) +
           "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "R,n_roots,roots\n";
  for (const auto& row : rows) {
    std::string roots;
    for (double r : row.roots) roots += (roots.empty() ? "" : ";") + format_number(r);
    out += format_number(row.R) + "," + (row.error.empty() ? std::to_string(row.n_roots) : "") + "," + roots + "\n";
  }
  return out;
}

nlohmann::json to_json(const ExistenceReport& report, const std::vector<MismatchRoot>& roots) {
  nlohmann::json j;
  j["n_roots"] = report.n_roots;
  j["roots"] = nlohmann::json::array();
  for (const auto& r : roots) {
    j["roots"].push_back({{"lambda", r.lambda},
                          {"bracket_lo", r.bracket_lo},
                          {"bracket_hi", r.bracket_hi},
                          {"phi_residual", r.phi_residual}});
  }
  j["min_abs_phi"] = number_or_null(report.min_abs_phi);
  j["phi_sign_pattern"] = to_string(report.phi_sign_pattern);
  j["inconclusive_flags"] = report.inconclusive_flags;
  j["scanned_interval"] = {report.lambda_min, report.lambda_max};
  return j;
}

nlohmann::json to_json(const RstarEstimate& e) {
  nlohmann::json j;
  j["r_low"] = number_or_null(e.r_low);
  j["r_high"] = number_or_null(e.r_high);
  j["iterations"] = e.iterations;
  j["scan_window"] = {e.scan_window.lambda_min, e.scan_window.lambda_max};
  j["samples"] = e.scan_window.samples;
  j["status"] = to_string(e.status);
  j["probes"] = nlohmann::json::array();
  for (const auto& p : e.probes) {
    j["probes"].push_back({{"R", p.R}, {"n_roots", p.n_roots}, {"roots", p.roots}, {"inconclusive", p.inconclusive}});
  }
  j["warnings"] = e.warnings;
  return j;
}

nlohmann::json to_json(const AssumptionReport& r) {
  nlohmann::json j;
  j["f_monotone"] = r.f_monotone;
  j["f_zero_at_zero"] = r.f_zero_at_zero;
  j["liminf_ratio_estimate"] = number_or_null(r.liminf_ratio_estimate);
  j["AR_holds_on_tail"] = {{"holds", r.AR_holds_on_tail.holds},
                           {"T", r.AR_holds_on_tail.T},
                           {"theta0", number_or_null(r.AR_holds_on_tail.theta0)}};
  j["gap_min"] = number_or_null(r.gap_min);
  j["gap_sign_changes"] = nlohmann::json::array();
  for (const auto& c : r.gap_sign_changes) j["gap_sign_changes"].push_back({c.lo, c.hi});
  j["ratio_at_infinity_estimate"] = number_or_null(r.ratio_at_infinity_estimate);
  return j;
}

}  // namespace nlneumann
