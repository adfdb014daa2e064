#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "wmean/expr.hpp"
#include "wmean/quadrature.hpp"

namespace wmean {

/// Radial weight w(t, r), t = |x - y|, used to form weighted volume means
/// over B_r(x). Built-in families:
///   Log          log(r / t)
///   Riesz(alpha) t^{alpha-m} - r^{alpha-m},  0 < alpha < m
///   Power(beta)  r^beta - t^beta,            beta > 0
/// plus Custom, an expression in t and r.
class Weight {
 public:
  enum class Kind { Log, Riesz, Power, Custom };

  static Weight log(int m);
  static Weight riesz(int m, double alpha);
  static Weight power(int m, double beta);
  static Weight custom(int m, const Expr& w);
  static Weight custom(int m, std::string_view source);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return m_; }
  double parameter() const noexcept { return param_; }
  bool has_closed_form() const noexcept { return kind_ != Kind::Custom; }

  /// w(t, r) for t, r > 0. Custom evaluation errors propagate as EvalError.
  double value(double t, double r) const;

  /// W(T) = ∫_0^T t^{m-1} w(t, r) dt. Closed forms for the built-ins;
  /// graded quadrature (with a divergence check) for custom weights.
  double radial_primitive(double T, double r) const;
  /// Numeric primitive with its error estimate; valid for every kind.
  Estimate radial_primitive_numeric(double T, double r) const;

  /// c_w(r) = (1/|B_r|) ∫_{B_r} w(|y|, r) dy = m W(r) / r^m.
  double mean_constant(double r) const;

  /// Spec string: "log", "riesz:alpha=0.5", "power:beta=2", "custom:<expr>".
  std::string spec() const;

 private:
  Weight(Kind kind, int m, double param) : kind_(kind), m_(m), param_(param) {}

  Kind kind_;
  int m_;
  double param_;
  std::shared_ptr<const Expr> expr_;
};

/// Parses "log" | "riesz:alpha=<real>" | "power:beta=<real>" | "custom:<expr>".
Weight parse_weight(std::string_view spec, int m);

/// Outcome of checking the sign and integrability conditions a weight must
/// satisfy to characterize balls by averaging.
struct WeightValidity {
  bool sign_below = false;    // w(t, r) > 0 on sampled t in (0, r)
  bool sign_above = false;    // w(t, r) < 0 on sampled t in (r, 4r)
  bool zero_at_r = false;     // |w(r, r)| <= 1e-12
  bool integrable = false;    // dyadic ratio test near t = 0
  double decay_exponent = 0;  // fitted s in I_k ~ 2^{-s k}; > 0 means summable
  std::string detail;         // first failing sample or evaluation error

  bool all_pass() const noexcept { return sign_below && sign_above && zero_at_r && integrable; }
};

/// Samples 10^4 points below and above r, checks w(r, r), and applies a
/// heuristic ratio test to I_k = ∫_{r 2^{-k-1}}^{r 2^{-k}} t^{m-1} |w| dt,
/// k = 1..60: the fitted decay exponent over the last 20 intervals must
/// exceed 0.01.
WeightValidity validate_weight(const Weight& w, double r);

}  // namespace wmean
