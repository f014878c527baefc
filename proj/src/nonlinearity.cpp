#include "nlneumann/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlneumann/errors.hpp"

namespace nlneumann {

namespace {

constexpr double kExpGuard = 700.0;
constexpr double kLinearGuard = 1e150;

// sinh and cosh - 1 of a >= 0 through expm1, accurate near zero.
double sinh_pos(double a) {
  const double e = std::expm1(a);
  return 0.5 * (e + e / (e + 1.0));
}

double cosh_m1_pos(double a) {
  const double e = std::expm1(a);
  return 0.5 * e * (e / (e + 1.0));
}

double shape_bound(const ReactionPart& part) {
  switch (part.shape) {
    case ReactionFamily::linear: return kLinearGuard;
    case ReactionFamily::sinh: return kExpGuard;
    case ReactionFamily::odd_power: return std::pow(10.0, 300.0 / part.exponent);
    case ReactionFamily::composite: break;
  }
  throw PreconditionError("reaction part cannot itself be composite");
}

// h(a), H(a), h'(a) for a = |s t| >= 0.
double shape_h(const ReactionPart& part, double a) {
  switch (part.shape) {
    case ReactionFamily::linear: return a;
    case ReactionFamily::sinh: return sinh_pos(a);
    case ReactionFamily::odd_power: return std::pow(a, part.exponent - 1.0);
    default: return 0.0;
  }
}

double shape_H(const ReactionPart& part, double a) {
  switch (part.shape) {
    case ReactionFamily::linear: return 0.5 * a * a;
    case ReactionFamily::sinh: return cosh_m1_pos(a);
    case ReactionFamily::odd_power: return std::pow(a, part.exponent) / part.exponent;
    default: return 0.0;
  }
}

double shape_dh(const ReactionPart& part, double a) {
  switch (part.shape) {
    case ReactionFamily::linear: return 1.0;
    case ReactionFamily::sinh: return 1.0 + cosh_m1_pos(a);
    case ReactionFamily::odd_power: {
      const double p = part.exponent;
      if (p == 2.0) return 1.0;
      // |t|^(p-2) is unbounded at 0 for p < 2; keep the Jacobian finite.
      const double base = p < 2.0 ? std::max(a, 1e-12) : a;
      return (p - 1.0) * std::pow(base, p - 2.0);
    }
    default: return 0.0;
  }
}

const char* reaction_name(ReactionFamily family) {
  switch (family) {
    case ReactionFamily::linear: return "linear";
    case ReactionFamily::sinh: return "sinh";
    case ReactionFamily::odd_power: return "odd-power";
    case ReactionFamily::composite: return "composite";
  }
  return "?";
}

const char* flux_name(FluxFamily family) {
  switch (family) {
    case FluxFamily::constant: return "constant";
    case FluxFamily::linear_affine: return "linear-affine";
    case FluxFamily::paper_sinh: return "paper-sinh";
    case FluxFamily::scaled_sqrt2F: return "scaled-sqrt2F";
    case FluxFamily::composite: return "composite";
  }
  return "?";
}

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) throw DomainError(std::string(what) + ": argument is not finite");
}

}  // namespace

ReactionTerm::ReactionTerm(ReactionFamily family, std::vector<ReactionPart> parts)
    : family_(family), parts_(std::move(parts)) {
  if (parts_.empty()) throw PreconditionError("reaction term needs at least one part");
  bound_ = std::numeric_limits<double>::infinity();
  coercivity_ = 0.0;
  bool theta_known = true;
  double theta = std::numeric_limits<double>::infinity();
  for (const auto& part : parts_) {
    if (part.shape == ReactionFamily::composite) throw PreconditionError("nested composite reaction");
    if (!(part.weight > 0.0) || !(part.scale > 0.0) || !std::isfinite(part.weight) ||
        !std::isfinite(part.scale)) {
      throw PreconditionError("reaction part weight and scale must be positive and finite");
    }
    if (part.shape == ReactionFamily::odd_power && !(part.exponent > 1.0 && std::isfinite(part.exponent))) {
      throw PreconditionError("odd-power exponent must exceed 1");
    }
    bound_ = std::min(bound_, shape_bound(part) / part.scale);
    switch (part.shape) {
      case ReactionFamily::linear:
        coercivity_ += part.weight * part.scale;
        theta = std::min(theta, 2.0);
        break;
      case ReactionFamily::sinh:
        coercivity_ += part.weight * part.scale;
        theta_known = false;
        break;
      case ReactionFamily::odd_power:
        if (part.exponent == 2.0) coercivity_ += part.weight * part.scale;
        theta = std::min(theta, part.exponent);
        break;
      default: break;
    }
  }
  // t f >= theta F holds termwise, so the smallest known exponent is valid for
  // the sum; a sinh part makes the sum exponential and the bound tail-dependent.
  if (theta_known) theta0_ = theta;
}

ReactionTerm ReactionTerm::linear(double c) {
  if (!(c > 0.0)) throw PreconditionError("linear reaction needs c > 0");
  return ReactionTerm(ReactionFamily::linear, {ReactionPart{ReactionFamily::linear, c, 1.0, 3.0}});
}

ReactionTerm ReactionTerm::sinh() {
  return ReactionTerm(ReactionFamily::sinh, {ReactionPart{ReactionFamily::sinh, 1.0, 1.0, 3.0}});
}

ReactionTerm ReactionTerm::odd_power(double p) {
  return ReactionTerm(ReactionFamily::odd_power, {ReactionPart{ReactionFamily::odd_power, 1.0, 1.0, p}});
}

ReactionTerm ReactionTerm::composite(std::vector<ReactionPart> parts) {
  return ReactionTerm(ReactionFamily::composite, std::move(parts));
}

void ReactionTerm::guard(double t) const {
  require_finite(t, "reaction");
  if (std::fabs(t) > bound_) {
    std::ostringstream msg;
    msg << "|t| = " << std::fabs(t) << " exceeds the overflow guard " << bound_ << " of the "
        << reaction_name(family_) << " reaction";
    throw DomainError(msg.str());
  }
}

double ReactionTerm::f(double t) const {
  guard(t);
  const double a = std::fabs(t);
  double sum = 0.0;
  for (const auto& part : parts_) sum += part.weight * shape_h(part, part.scale * a);
  return t < 0.0 ? -sum : sum;
}

double ReactionTerm::F(double t) const {
  guard(t);
  const double a = std::fabs(t);
  double sum = 0.0;
  for (const auto& part : parts_) sum += part.weight / part.scale * shape_H(part, part.scale * a);
  return sum;
}

double ReactionTerm::df(double t) const {
  guard(t);
  const double a = std::fabs(t);
  double sum = 0.0;
  for (const auto& part : parts_) sum += part.weight * part.scale * shape_dh(part, part.scale * a);
  return sum;
}

std::string ReactionTerm::describe() const {
  std::ostringstream out;
  if (family_ != ReactionFamily::composite) {
    const auto& part = parts_.front();
    out << reaction_name(family_);
    if (family_ == ReactionFamily::linear) out << "(c=" << part.weight << ")";
    if (family_ == ReactionFamily::odd_power) out << "(p=" << part.exponent << ")";
    return out.str();
  }
  out << "composite[";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& part = parts_[i];
    if (i) out << " + ";
    out << part.weight << "*" << reaction_name(part.shape) << "(" << part.scale << "t";
    if (part.shape == ReactionFamily::odd_power) out << "; p=" << part.exponent;
    out << ")";
  }
  out << "]";
  return out.str();
}

BoundaryFlux::BoundaryFlux(FluxFamily family, std::vector<FluxPart> parts, std::optional<ReactionTerm> reaction)
    : family_(family), parts_(std::move(parts)), reaction_(std::move(reaction)) {
  if (parts_.empty()) throw PreconditionError("boundary flux needs at least one part");
  bound_ = std::numeric_limits<double>::infinity();
  for (const auto& part : parts_) {
    if (!std::isfinite(part.weight) || !std::isfinite(part.c) || !std::isfinite(part.a) ||
        !std::isfinite(part.b) || !std::isfinite(part.delta)) {
      throw PreconditionError("boundary flux parameters must be finite");
    }
    switch (part.shape) {
      case FluxFamily::paper_sinh:
        if (part.sigma != 1.0 && part.sigma != -1.0) throw PreconditionError("paper-sinh sigma must be +1 or -1");
        bound_ = std::min(bound_, 2.0 * kExpGuard);
        break;
      case FluxFamily::scaled_sqrt2F:
        if (!reaction_) throw PreconditionError("scaled-sqrt2F flux needs a reaction term");
        bound_ = std::min(bound_, reaction_->overflow_bound());
        break;
      case FluxFamily::composite: throw PreconditionError("nested composite flux");
      default: break;
    }
  }
}

BoundaryFlux BoundaryFlux::constant(double c) {
  FluxPart part{FluxFamily::constant};
  part.c = c;
  return BoundaryFlux(FluxFamily::constant, {part}, std::nullopt);
}

BoundaryFlux BoundaryFlux::linear_affine(double a, double b) {
  FluxPart part{FluxFamily::linear_affine};
  part.a = a;
  part.b = b;
  return BoundaryFlux(FluxFamily::linear_affine, {part}, std::nullopt);
}

BoundaryFlux BoundaryFlux::paper_sinh(double sigma) {
  FluxPart part{FluxFamily::paper_sinh};
  part.sigma = sigma;
  return BoundaryFlux(FluxFamily::paper_sinh, {part}, std::nullopt);
}

BoundaryFlux BoundaryFlux::scaled_sqrt2F(double c, double delta, const ReactionTerm& reaction) {
  FluxPart part{FluxFamily::scaled_sqrt2F};
  part.c = c;
  part.delta = delta;
  return BoundaryFlux(FluxFamily::scaled_sqrt2F, {part}, reaction);
}

BoundaryFlux BoundaryFlux::composite(std::vector<FluxPart> parts, std::optional<ReactionTerm> reaction) {
  return BoundaryFlux(FluxFamily::composite, std::move(parts), std::move(reaction));
}

double BoundaryFlux::g(double t) const {
  require_finite(t, "flux");
  if (std::fabs(t) > bound_) {
    std::ostringstream msg;
    msg << "|t| = " << std::fabs(t) << " exceeds the overflow guard " << bound_ << " of the "
        << flux_name(family_) << " flux";
    throw DomainError(msg.str());
  }
  double sum = 0.0;
  for (const auto& part : parts_) {
    double value = 0.0;
    switch (part.shape) {
      case FluxFamily::constant: value = part.c; break;
      case FluxFamily::linear_affine: value = part.a * t + part.b; break;
      case FluxFamily::paper_sinh: value = part.sigma * (1.0 + 4.0 * sinh_pos(0.5 * std::fabs(t))); break;
      case FluxFamily::scaled_sqrt2F:
        value = part.c * std::sqrt(2.0 * reaction_->F(t) + part.delta * part.delta);
        break;
      case FluxFamily::composite: break;
    }
    sum += part.weight * value;
  }
  return sum;
}

std::string BoundaryFlux::describe() const {
  std::ostringstream out;
  auto one = [&out](const FluxPart& part) {
    out << flux_name(part.shape);
    switch (part.shape) {
      case FluxFamily::constant: out << "(c=" << part.c << ")"; break;
      case FluxFamily::linear_affine: out << "(a=" << part.a << ", b=" << part.b << ")"; break;
      case FluxFamily::paper_sinh: out << "(sigma=" << part.sigma << ")"; break;
      case FluxFamily::scaled_sqrt2F: out << "(c=" << part.c << ", delta=" << part.delta << ")"; break;
      default: break;
    }
  };
  if (family_ != FluxFamily::composite) {
    one(parts_.front());
    return out.str();
  }
  out << "composite[";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out << " + ";
    out << parts_[i].weight << "*";
    one(parts_[i]);
  }
  out << "]";
  return out.str();
}

double eval_f(const ReactionTerm& reaction, double t) { return reaction.f(t); }
double eval_F(const ReactionTerm& reaction, double t) { return reaction.F(t); }
double eval_g(const BoundaryFlux& flux, double t) { return flux.g(t); }

double primitive_by_quadrature(const ReactionTerm& reaction, double t) {
  reaction.f(t);  // guard
  if (t == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&reaction](double s) { return reaction.f(s); };
  // Relative tolerance 1e-14 implies the 1e-12 absolute target while |F| < 100.
  const double lo = std::min(0.0, t);
  const double hi = std::max(0.0, t);
  const double value = gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 20, 1e-14);
  return t < 0.0 ? -value : value;
}

bool AssumptionReport::flux_condition_holds() const {
  return gap_sign_changes.empty() && gap_min > 0.0 && std::fabs(ratio_at_infinity_estimate - 1.0) > 1e-3;
}

AssumptionReport check_assumptions(const ReactionTerm& reaction, const BoundaryFlux& flux, const CheckGrid& grid) {
  if (!(grid.t_max > grid.tail_T && grid.tail_T > 0.0)) {
    throw PreconditionError("check grid needs t_max > tail_T > 0");
  }
  if (grid.n_points < 100) throw PreconditionError("check grid needs at least 100 points");
  if (grid.t_max > std::min(reaction.overflow_bound(), flux.overflow_bound())) {
    throw DomainError("check grid t_max exceeds the overflow guard");
  }

  // Odd point count so that t = 0 is sampled exactly.
  const int n = grid.n_points % 2 == 1 ? grid.n_points : grid.n_points + 1;
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = grid.t_max * (2.0 * i / (n - 1) - 1.0);
  }
  ts[(n - 1) / 2] = 0.0;

  auto gap = [&](double t) {
    const double g = flux.g(t);
    return g * g - 2.0 * reaction.F(t);
  };

  AssumptionReport report;
  report.f_zero_at_zero = reaction.f(0.0) == 0.0;

  report.f_monotone = true;
  double previous = reaction.f(ts.front());
  for (int i = 1; i < n; ++i) {
    const double current = reaction.f(ts[i]);
    if (!(current > previous)) report.f_monotone = false;
    previous = current;
  }

  report.liminf_ratio_estimate = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 200; ++k) {
    const double a = std::pow(10.0, -6.0 + 5.0 * k / 200.0);
    for (double t : {a, -a}) report.liminf_ratio_estimate = std::min(report.liminf_ratio_estimate, reaction.f(t) / t);
  }

  report.AR_holds_on_tail.T = grid.tail_T;
  report.AR_holds_on_tail.theta0 = std::numeric_limits<double>::infinity();
  auto tail_ratio = [&](double t) { return t * reaction.f(t) / reaction.F(t); };
  for (double t : ts) {
    if (std::fabs(t) >= grid.tail_T) report.AR_holds_on_tail.theta0 = std::min(report.AR_holds_on_tail.theta0, tail_ratio(t));
  }
  for (double t : {grid.tail_T, -grid.tail_T}) {
    report.AR_holds_on_tail.theta0 = std::min(report.AR_holds_on_tail.theta0, tail_ratio(t));
  }
  report.AR_holds_on_tail.holds = report.AR_holds_on_tail.theta0 > 1.0;

  std::vector<double> gaps(n);
  for (int i = 0; i < n; ++i) gaps[i] = gap(ts[i]);
  report.gap_min = std::numeric_limits<double>::infinity();
  for (double value : gaps) report.gap_min = std::min(report.gap_min, std::fabs(value));

  for (int i = 0; i < n; ++i) {
    if (gaps[i] == 0.0) {
      report.gap_sign_changes.push_back({ts[i], ts[i]});
      continue;
    }
    if (i + 1 < n && gaps[i + 1] != 0.0 && std::signbit(gaps[i]) != std::signbit(gaps[i + 1])) {
      double lo = ts[i];
      double hi = ts[i + 1];
      const bool lo_negative = gaps[i] < 0.0;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double value = gap(mid);
        if (value == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((value < 0.0) == lo_negative) lo = mid;
        else hi = mid;
      }
      report.gap_sign_changes.push_back({lo, hi});
    }
  }

  auto ratio = [&](double t) {
    const double g = flux.g(t);
    return g * g / (2.0 * reaction.F(t));
  };
  const double ratio_hi = ratio(grid.t_max);
  const double ratio_lo = ratio(-grid.t_max);
  report.ratio_at_infinity_estimate =
      std::fabs(std::log(ratio_hi)) <= std::fabs(std::log(ratio_lo)) ? ratio_hi : ratio_lo;

  report.g_at_zero = flux.g(0.0);
  report.inf_g_over_sqrt2F = std::numeric_limits<double>::infinity();
  report.sup_g_over_sqrt2F = -std::numeric_limits<double>::infinity();
  for (double t : ts) {
    if (t == 0.0) continue;
    const double q = flux.g(t) / std::sqrt(2.0 * reaction.F(t));
    report.inf_g_over_sqrt2F = std::min(report.inf_g_over_sqrt2F, q);
    report.sup_g_over_sqrt2F = std::max(report.sup_g_over_sqrt2F, q);
  }
  report.positive_branch_condition = report.g_at_zero > 0.0 && report.inf_g_over_sqrt2F > 1.0;
  report.negative_branch_condition = report.g_at_zero < 0.0 && report.sup_g_over_sqrt2F < -1.0;
  return report;
}

}  // namespace nlneumann
