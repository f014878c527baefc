#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlneumann {

enum class ReactionFamily { linear, sinh, odd_power, composite };

/// One summand `weight * h(scale * t)` of a reaction term, h a built-in shape.
struct ReactionPart {
  ReactionFamily shape = ReactionFamily::linear;  // never `composite`
  double weight = 1.0;
  double scale = 1.0;
  double exponent = 3.0;  // odd_power only

  bool operator==(const ReactionPart&) const = default;
};

/// The reaction f, its primitive F(t) = int_0^t f and derivative f'.
///
/// Every instance is a positive combination of the built-in shapes
///   linear     h(t) = t                 H(t) = t^2/2
///   sinh       h(t) = sinh t            H(t) = cosh t - 1
///   odd_power  h(t) = sgn(t)|t|^(p-1)   H(t) = |t|^p / p
/// so f(0) = 0, f is odd and strictly increasing, and F has a closed form.
/// Evaluation throws DomainError beyond the overflow guard.
class ReactionTerm {
 public:
  static ReactionTerm linear(double c = 1.0);
  static ReactionTerm sinh();
  static ReactionTerm odd_power(double p);
  static ReactionTerm composite(std::vector<ReactionPart> parts);

  ReactionFamily family() const noexcept { return family_; }
  std::span<const ReactionPart> parts() const noexcept { return parts_; }

  double f(double t) const;
  double F(double t) const;
  double df(double t) const;

  /// M with t f(t) >= M t^2 for all t (0 when no such M > 0 exists).
  double coercivity() const noexcept { return coercivity_; }
  /// Known growth exponent with t f(t) >= theta0 F(t) on the tail; empty for
  /// families where any theta0 > 1 works eventually (sinh).
  std::optional<double> theta0() const noexcept { return theta0_; }
  /// Largest |t| accepted by f, F and df.
  double overflow_bound() const noexcept { return bound_; }

  std::string describe() const;

  bool operator==(const ReactionTerm& other) const { return parts_ == other.parts_ && family_ == other.family_; }

 private:
  ReactionTerm(ReactionFamily family, std::vector<ReactionPart> parts);
  void guard(double t) const;

  ReactionFamily family_;
  std::vector<ReactionPart> parts_;
  double coercivity_ = 0.0;
  std::optional<double> theta0_;
  double bound_ = 0.0;
};

enum class FluxFamily { constant, linear_affine, paper_sinh, scaled_sqrt2F, composite };

/// One summand `weight * g_k(t)` of a boundary flux.
struct FluxPart {
  FluxFamily shape = FluxFamily::constant;  // never `composite`
  double weight = 1.0;
  double c = 1.0;      // constant, scaled_sqrt2F
  double a = 0.0;      // linear_affine slope
  double b = 0.0;      // linear_affine intercept
  double sigma = 1.0;  // paper_sinh sign, +1 or -1
  double delta = 0.0;  // scaled_sqrt2F offset

  bool operator==(const FluxPart&) const = default;
};

/// The boundary nonlinearity g.
///
///   constant(c)            g = c
///   linear_affine(a, b)    g = a t + b
///   paper_sinh(sigma)      g = sigma (1 + 4 sinh(|t|/2))
///   scaled_sqrt2F(c, d)    g = c sqrt(2 F(t) + d^2)    (needs the reaction)
///   composite              sum of weighted parts
class BoundaryFlux {
 public:
  static BoundaryFlux constant(double c);
  static BoundaryFlux linear_affine(double a, double b);
  static BoundaryFlux paper_sinh(double sigma);
  static BoundaryFlux scaled_sqrt2F(double c, double delta, const ReactionTerm& reaction);
  static BoundaryFlux composite(std::vector<FluxPart> parts,
                                std::optional<ReactionTerm> reaction = std::nullopt);

  FluxFamily family() const noexcept { return family_; }
  std::span<const FluxPart> parts() const noexcept { return parts_; }

  double g(double t) const;
  double overflow_bound() const noexcept { return bound_; }

  std::string describe() const;

 private:
  BoundaryFlux(FluxFamily family, std::vector<FluxPart> parts, std::optional<ReactionTerm> reaction);

  FluxFamily family_;
  std::vector<FluxPart> parts_;
  std::optional<ReactionTerm> reaction_;
  double bound_ = 0.0;
};

double eval_f(const ReactionTerm& reaction, double t);
double eval_F(const ReactionTerm& reaction, double t);
double eval_g(const BoundaryFlux& flux, double t);

/// F(t) by adaptive Gauss-Kronrod quadrature of f, absolute tolerance 1e-12.
/// Reference route for the closed forms.
double primitive_by_quadrature(const ReactionTerm& reaction, double t);

struct CheckGrid {
  double t_max = 50.0;
  int n_points = 2001;
  double tail_T = 10.0;

  bool operator==(const CheckGrid&) const = default;
};

struct GapCrossing {
  double lo = 0.0;
  double hi = 0.0;
};

struct TailCheck {
  bool holds = false;
  double T = 0.0;
  double theta0 = 0.0;  // min of t f(t)/F(t) over T <= |t| <= t_max
};

/// Sampled evidence for the standing assumptions on f and g. Never a proof.
struct AssumptionReport {
  bool f_monotone = false;
  bool f_zero_at_zero = false;
  double liminf_ratio_estimate = 0.0;  // min f(t)/t over 1e-6 <= |t| <= 1e-1
  TailCheck AR_holds_on_tail;
  double gap_min = 0.0;  // min |g^2 - 2F| on the grid
  std::vector<GapCrossing> gap_sign_changes;
  double ratio_at_infinity_estimate = 0.0;  // g^2/(2F) at the end of the grid closest to 1

  // Sufficient sign conditions on g/sqrt(2F) away from t = 0.
  double g_at_zero = 0.0;
  double inf_g_over_sqrt2F = 0.0;
  double sup_g_over_sqrt2F = 0.0;
  bool positive_branch_condition = false;  // g(0) > 0 and inf > 1
  bool negative_branch_condition = false;  // g(0) < 0 and sup < -1

  /// g^2 != 2F on the grid and the ratio at infinity stays away from 1.
  bool flux_condition_holds() const;
};

AssumptionReport check_assumptions(const ReactionTerm& reaction, const BoundaryFlux& flux,
                                   const CheckGrid& grid = {});

}  // namespace nlneumann
