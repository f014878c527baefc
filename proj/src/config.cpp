#include "nlneumann/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nlneumann/errors.hpp"

namespace nlneumann {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text, int line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'", line);
  }
  return value;
}

int to_int(const std::string& key, const std::string& text, int line) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'", line);
  }
  return value;
}

std::vector<double> to_list(const std::string& key, const std::string& text, int line) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item, line));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list", line);
  return out;
}

std::string one_of(const std::string& key, const std::string& text, const std::set<std::string>& allowed, int line) {
  if (!allowed.count(text)) {
    std::string names;
    for (const auto& a : allowed) names += (names.empty() ? "" : ", ") + a;
    throw ConfigError(key + ": unknown value '" + text + "' (expected one of " + names + ")", line);
  }
  return text;
}

const std::map<std::string, ReactionFamily> kReactionShapes = {
    {"linear", ReactionFamily::linear}, {"sinh", ReactionFamily::sinh}, {"odd-power", ReactionFamily::odd_power}};

const std::map<std::string, FluxFamily> kFluxShapes = {{"constant", FluxFamily::constant},
                                                       {"linear-affine", FluxFamily::linear_affine},
                                                       {"paper-sinh", FluxFamily::paper_sinh},
                                                       {"scaled-sqrt2F", FluxFamily::scaled_sqrt2F}};

std::string reaction_shape_name(ReactionFamily f) {
  for (const auto& [name, family] : kReactionShapes) {
    if (family == f) return name;
  }
  return "?";
}

std::string flux_shape_name(FluxFamily f) {
  for (const auto& [name, family] : kFluxShapes) {
    if (family == f) return name;
  }
  return "?";
}

// shape:weight:scale[:exponent]; terms separated by ';'.
std::vector<ReactionPart> parse_reaction_terms(const std::string& key, const std::string& text, int line) {
  std::vector<ReactionPart> parts;
  for (const auto& term : split(text, ';')) {
    if (term.empty()) continue;
    const auto fields = split(term, ':');
    const auto shape = kReactionShapes.find(fields[0]);
    if (shape == kReactionShapes.end()) throw ConfigError(key + ": unknown reaction shape '" + fields[0] + "'", line);
    const std::size_t expected = shape->second == ReactionFamily::odd_power ? 4 : 3;
    if (fields.size() != expected) {
      throw ConfigError(key + ": term '" + term + "' needs " + std::to_string(expected) + " ':'-separated fields", line);
    }
    ReactionPart part;
    part.shape = shape->second;
    part.weight = to_double(key, fields[1], line);
    part.scale = to_double(key, fields[2], line);
    if (expected == 4) part.exponent = to_double(key, fields[3], line);
    parts.push_back(part);
  }
  if (parts.empty()) throw ConfigError(key + ": no terms given", line);
  return parts;
}

// shape:weight:params...; constant:w:c, linear-affine:w:a:b, paper-sinh:w:sigma,
// scaled-sqrt2F:w:c:delta.
std::vector<FluxPart> parse_flux_terms(const std::string& key, const std::string& text, int line) {
  std::vector<FluxPart> parts;
  for (const auto& term : split(text, ';')) {
    if (term.empty()) continue;
    const auto fields = split(term, ':');
    const auto shape = kFluxShapes.find(fields[0]);
    if (shape == kFluxShapes.end()) throw ConfigError(key + ": unknown flux shape '" + fields[0] + "'", line);
    const bool two = shape->second == FluxFamily::linear_affine || shape->second == FluxFamily::scaled_sqrt2F;
    const std::size_t expected = two ? 4 : 3;
    if (fields.size() != expected) {
      throw ConfigError(key + ": term '" + term + "' needs " + std::to_string(expected) + " ':'-separated fields", line);
    }
    FluxPart part;
    part.shape = shape->second;
    part.weight = to_double(key, fields[1], line);
    const double p1 = to_double(key, fields[2], line);
    const double p2 = two ? to_double(key, fields[3], line) : 0.0;
    switch (part.shape) {
      case FluxFamily::constant: part.c = p1; break;
      case FluxFamily::linear_affine: part.a = p1; part.b = p2; break;
      case FluxFamily::paper_sinh: part.sigma = p1; break;
      case FluxFamily::scaled_sqrt2F: part.c = p1; part.delta = p2; break;
      case FluxFamily::composite: break;
    }
    parts.push_back(part);
  }
  if (parts.empty()) throw ConfigError(key + ": no terms given", line);
  return parts;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + num(x);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value, int line)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dimension", [](RunConfig& c, auto& k, auto& v, int l) { c.dimension = to_int(k, v, l); }},
      {"epsilon",
       [](RunConfig& c, auto& k, auto& v, int l) {
         c.epsilon = to_double(k, v, l);
         c.radius.reset();
       }},
      {"radius",
       [](RunConfig& c, auto& k, auto& v, int l) {
         c.radius = to_double(k, v, l);
         c.epsilon.reset();
       }},
      {"f.family",
       [](RunConfig& c, auto& k, auto& v, int l) {
         c.reaction.family = one_of(k, v, {"linear", "sinh", "odd-power", "composite"}, l);
       }},
      {"f.c", [](RunConfig& c, auto& k, auto& v, int l) { c.reaction.c = to_double(k, v, l); }},
      {"f.p", [](RunConfig& c, auto& k, auto& v, int l) { c.reaction.p = to_double(k, v, l); }},
      {"f.terms", [](RunConfig& c, auto& k, auto& v, int l) { c.reaction.terms = parse_reaction_terms(k, v, l); }},
      {"g.family",
       [](RunConfig& c, auto& k, auto& v, int l) {
         c.flux.family =
             one_of(k, v, {"constant", "linear-affine", "paper-sinh", "scaled-sqrt2F", "composite"}, l);
       }},
      {"g.c", [](RunConfig& c, auto& k, auto& v, int l) { c.flux.c = to_double(k, v, l); }},
      {"g.a", [](RunConfig& c, auto& k, auto& v, int l) { c.flux.a = to_double(k, v, l); }},
      {"g.b", [](RunConfig& c, auto& k, auto& v, int l) { c.flux.b = to_double(k, v, l); }},
      {"g.sigma", [](RunConfig& c, auto& k, auto& v, int l) { c.flux.sigma = to_double(k, v, l); }},
      {"g.delta", [](RunConfig& c, auto& k, auto& v, int l) { c.flux.delta = to_double(k, v, l); }},
      {"g.terms", [](RunConfig& c, auto& k, auto& v, int l) { c.flux.terms = parse_flux_terms(k, v, l); }},
      {"check.t_max", [](RunConfig& c, auto& k, auto& v, int l) { c.check.t_max = to_double(k, v, l); }},
      {"check.n_points", [](RunConfig& c, auto& k, auto& v, int l) { c.check.n_points = to_int(k, v, l); }},
      {"check.tail_T", [](RunConfig& c, auto& k, auto& v, int l) { c.check.tail_T = to_double(k, v, l); }},
      {"lambda", [](RunConfig& c, auto& k, auto& v, int l) { c.lambda = to_double(k, v, l); }},
      {"mesh-n", [](RunConfig& c, auto& k, auto& v, int l) { c.mesh_n = to_int(k, v, l); }},
      {"grading", [](RunConfig& c, auto& k, auto& v, int l) { c.grading = one_of(k, v, {"uniform", "layer"}, l); }},
      {"tol", [](RunConfig& c, auto& k, auto& v, int l) { c.tol = to_double(k, v, l); }},
      {"max-newton", [](RunConfig& c, auto& k, auto& v, int l) { c.max_newton = to_int(k, v, l); }},
      {"lambda-min", [](RunConfig& c, auto& k, auto& v, int l) { c.lambda_min = to_double(k, v, l); }},
      {"lambda-max", [](RunConfig& c, auto& k, auto& v, int l) { c.lambda_max = to_double(k, v, l); }},
      {"samples", [](RunConfig& c, auto& k, auto& v, int l) { c.samples = to_int(k, v, l); }},
      {"refine-tol", [](RunConfig& c, auto& k, auto& v, int l) { c.refine_tol = to_double(k, v, l); }},
      {"mode",
       [](RunConfig& c, auto& k, auto& v, int l) { c.mode = one_of(k, v, {"identity", "case1", "case2", "decay"}, l); }},
      {"eps-ladder", [](RunConfig& c, auto& k, auto& v, int l) { c.eps_ladder = to_list(k, v, l); }},
      {"lambda-schedule",
       [](RunConfig& c, auto& k, auto& v, int l) { c.lambda_schedule = one_of(k, v, {"fixed", "inv-eps"}, l); }},
      {"lambda-cap", [](RunConfig& c, auto& k, auto& v, int l) { c.lambda_cap = to_double(k, v, l); }},
      {"M", [](RunConfig& c, auto& k, auto& v, int l) { c.M = to_double(k, v, l); }},
      {"r-min", [](RunConfig& c, auto& k, auto& v, int l) { c.r_min = to_double(k, v, l); }},
      {"r-max", [](RunConfig& c, auto& k, auto& v, int l) { c.r_max = to_double(k, v, l); }},
      {"bisect-tol", [](RunConfig& c, auto& k, auto& v, int l) { c.bisect_tol = to_double(k, v, l); }},
      {"r-ladder", [](RunConfig& c, auto& k, auto& v, int l) { c.r_ladder = to_list(k, v, l); }},
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value, int line) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line);
  it->second(config, key, trim(value), line);
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + content + "'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (!setters().count(key)) throw ConfigError("unknown key '" + key + "'", line);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line);
    if ((key == "epsilon" && seen.count("radius")) || (key == "radius" && seen.count("epsilon"))) {
      throw ConfigError("epsilon and radius are mutually exclusive", line);
    }
    apply_setting(config, key, value, line);
  }
  return config;
}

std::string print_config(const RunConfig& c) {
  std::ostringstream out;
  out << "dimension = " << c.dimension << "\n";
  if (c.epsilon) out << "epsilon = " << num(*c.epsilon) << "\n";
  if (c.radius) out << "radius = " << num(*c.radius) << "\n";
  out << "f.family = " << c.reaction.family << "\n";
  out << "f.c = " << num(c.reaction.c) << "\n";
  out << "f.p = " << num(c.reaction.p) << "\n";
  if (!c.reaction.terms.empty()) {
    out << "f.terms = ";
    for (std::size_t i = 0; i < c.reaction.terms.size(); ++i) {
      const auto& t = c.reaction.terms[i];
      out << (i ? "; " : "") << reaction_shape_name(t.shape) << ":" << num(t.weight) << ":" << num(t.scale);
      if (t.shape == ReactionFamily::odd_power) out << ":" << num(t.exponent);
    }
    out << "\n";
  }
  out << "g.family = " << c.flux.family << "\n";
  out << "g.c = " << num(c.flux.c) << "\n";
  out << "g.a = " << num(c.flux.a) << "\n";
  out << "g.b = " << num(c.flux.b) << "\n";
  out << "g.sigma = " << num(c.flux.sigma) << "\n";
  out << "g.delta = " << num(c.flux.delta) << "\n";
  if (!c.flux.terms.empty()) {
    out << "g.terms = ";
    for (std::size_t i = 0; i < c.flux.terms.size(); ++i) {
      const auto& t = c.flux.terms[i];
      out << (i ? "; " : "") << flux_shape_name(t.shape) << ":" << num(t.weight) << ":";
      switch (t.shape) {
        case FluxFamily::constant: out << num(t.c); break;
        case FluxFamily::linear_affine: out << num(t.a) << ":" << num(t.b); break;
        case FluxFamily::paper_sinh: out << num(t.sigma); break;
        case FluxFamily::scaled_sqrt2F: out << num(t.c) << ":" << num(t.delta); break;
        case FluxFamily::composite: break;
      }
    }
    out << "\n";
  }
  out << "check.t_max = " << num(c.check.t_max) << "\n";
  out << "check.n_points = " << c.check.n_points << "\n";
  out << "check.tail_T = " << num(c.check.tail_T) << "\n";
  out << "lambda = " << num(c.lambda) << "\n";
  out << "mesh-n = " << c.mesh_n << "\n";
  out << "grading = " << c.grading << "\n";
  out << "tol = " << num(c.tol) << "\n";
  out << "max-newton = " << c.max_newton << "\n";
  out << "lambda-min = " << num(c.lambda_min) << "\n";
  out << "lambda-max = " << num(c.lambda_max) << "\n";
  out << "samples = " << c.samples << "\n";
  out << "refine-tol = " << num(c.refine_tol) << "\n";
  out << "mode = " << c.mode << "\n";
  out << "eps-ladder = " << list(c.eps_ladder) << "\n";
  if (!c.lambda_schedule.empty()) out << "lambda-schedule = " << c.lambda_schedule << "\n";
  out << "lambda-cap = " << num(c.lambda_cap) << "\n";
  if (c.M) out << "M = " << num(*c.M) << "\n";
  out << "r-min = " << num(c.r_min) << "\n";
  out << "r-max = " << num(c.r_max) << "\n";
  out << "bisect-tol = " << num(c.bisect_tol) << "\n";
  out << "r-ladder = " << list(c.r_ladder) << "\n";
  return out.str();
}

double RunConfig::effective_epsilon() const {
  if (epsilon) return *epsilon;
  if (radius) {
    if (!(*radius > 0.0)) throw ConfigError("radius must be positive");
    return 1.0 / *radius;
  }
  throw ConfigError("missing required key: epsilon or radius");
}

ReactionTerm RunConfig::reaction_term() const {
  const auto& r = reaction;
  if (r.family == "linear") return ReactionTerm::linear(r.c);
  if (r.family == "sinh") return ReactionTerm::sinh();
  if (r.family == "odd-power") return ReactionTerm::odd_power(r.p);
  if (r.family == "composite") {
    if (r.terms.empty()) throw ConfigError("f.family = composite needs f.terms");
    return ReactionTerm::composite(r.terms);
  }
  throw ConfigError("unknown reaction family '" + r.family + "'");
}

BoundaryFlux RunConfig::boundary_flux() const {
  const auto& g = flux;
  if (g.family == "constant") return BoundaryFlux::constant(g.c);
  if (g.family == "linear-affine") return BoundaryFlux::linear_affine(g.a, g.b);
  if (g.family == "paper-sinh") return BoundaryFlux::paper_sinh(g.sigma);
  if (g.family == "scaled-sqrt2F") return BoundaryFlux::scaled_sqrt2F(g.c, g.delta, reaction_term());
  if (g.family == "composite") {
    if (g.terms.empty()) throw ConfigError("g.family = composite needs g.terms");
    return BoundaryFlux::composite(g.terms, reaction_term());
  }
  throw ConfigError("unknown flux family '" + g.family + "'");
}

Problem RunConfig::problem() const {
  Problem p;
  p.dimension = dimension;
  p.epsilon = effective_epsilon();
  p.reaction = reaction_term();
  return p;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.mesh_n = mesh_n;
  o.grading = grading == "uniform" ? Grading::uniform : Grading::layer;
  o.tol = tol;
  o.max_newton = max_newton;
  return o;
}

ScanWindow RunConfig::scan_window() const {
  ScanWindow w;
  w.lambda_min = lambda_min;
  w.lambda_max = lambda_max;
  w.samples = samples;
  w.refine_tol = refine_tol;
  return w;
}

void validate(const RunConfig& config) {
  if (config.dimension < 1) throw ConfigError("dimension must be >= 1");
  if (config.epsilon && config.radius) throw ConfigError("epsilon and radius are mutually exclusive");
  if (config.epsilon && !(*config.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (config.radius && !(*config.radius > 0.0)) throw ConfigError("radius must be positive");
  if (config.max_newton < 1) throw ConfigError("max-newton must be >= 1");
  if (config.M && !(*config.M > 0.0)) throw ConfigError("M must be positive");
  config.reaction_term();
  config.boundary_flux();
}

}  // namespace nlneumann
