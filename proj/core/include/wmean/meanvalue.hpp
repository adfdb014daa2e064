#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmean/harmonic.hpp"
#include "wmean/quadrature.hpp"
#include "wmean/weights.hpp"

namespace wmean {

/// Rule sizes and Monte Carlo settings shared by the mean-value operations.
/// Product rules are used for m in {2, 3}; other dimensions fall back to
/// Monte Carlo with `mc_n` samples drawn from `seed`.
struct MeanOptions {
  RuleConfig rules;
  std::size_t mc_n = 1'000'000;
  std::uint64_t seed = 0;
};

/// True when the product rules cover dimension m.
bool has_product_rule(int m) noexcept;

/// A test function: a name and a value oracle. Non-harmonic functions are
/// allowed so negative controls can be run through the verifiers.
struct TestFunction {
  std::string name;
  ScalarField value;

  static TestFunction from(const HarmonicFn& u);
  /// |y|^2, which is not harmonic.
  static TestFunction squared_norm(int m);
};

/// Outcome of comparing the analytic side of an identity with a numeric one.
struct IdentityReport {
  std::string identity;  // spherical_mean, volume_mean, weighted_mean, gradient, probe
  std::string function;
  std::string weight;    // empty when no weight is involved
  Ball ball;
  int axis = -1;         // zero-based, gradient reports only
  double claimed = 0.0;
  Estimate computed;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  MeanOptions options;
};

/// (1/omega_m) Σ w_θ u(x + r θ) for m in {2, 3}; Monte Carlo otherwise.
Estimate spherical_mean(const ScalarField& u, const Ball& b, const MeanOptions& opt = {});

/// (1/|B|) ∫_B u dy.
Estimate volume_mean(const ScalarField& u, const Ball& b, const MeanOptions& opt = {});

/// (1/|B_r|) ∫_{B_r(x)} u(y) w(|x - y|, r) dy.
Estimate weighted_mean(const ScalarField& u, const Ball& b, const Weight& w,
                       const MeanOptions& opt = {});

/// weighted_mean for several weights sharing one pass over the nodes.
std::vector<Estimate> weighted_means(const ScalarField& u, const Ball& b,
                                     const std::vector<Weight>& weights,
                                     const MeanOptions& opt = {});

/// (m/|B_r|) ∫_{B_r(x)} u(y) (y_i - x_i) / |x - y|^2 dy, i zero-based.
Estimate gradient_weighted(const ScalarField& u, const Ball& b, int axis,
                           const MeanOptions& opt = {});
/// Every axis in one pass.
std::vector<Estimate> gradient_weighted_all(const ScalarField& u, const Ball& b,
                                            const MeanOptions& opt = {});

/// Weighted means for several weights plus all gradient components, sharing
/// one pass: the first weights.size() entries are means, the rest gradients.
std::vector<Estimate> weighted_means_and_gradient(const ScalarField& u, const Ball& b,
                                                  const std::vector<Weight>& weights,
                                                  const MeanOptions& opt = {});

/// Default tolerance for product-rule reports. Monte Carlo reports use
/// max(tol, 3 standard errors).
inline constexpr double kDefaultTolerance = 1e-8;

IdentityReport verify_spherical(const TestFunction& u, const Ball& b,
                                double tol = kDefaultTolerance, const MeanOptions& opt = {});
IdentityReport verify_volume(const TestFunction& u, const Ball& b,
                             double tol = kDefaultTolerance, const MeanOptions& opt = {});
/// claimed = c_w(r) u(x), computed = weighted_mean(u, B, w).
IdentityReport verify_identity(const TestFunction& u, const Ball& b, const Weight& w,
                               double tol = kDefaultTolerance, const MeanOptions& opt = {});
/// claimed = ∂_i u(x) from the analytic gradient.
IdentityReport verify_gradient(const HarmonicFn& u, const Ball& b, int axis,
                               double tol = kDefaultTolerance, const MeanOptions& opt = {});

/// Builds a report from the two sides; applies the MC band when relevant.
IdentityReport make_report(std::string identity, const std::string& function,
                           const std::string& weight, const Ball& b, double claimed,
                           const Estimate& computed, double tol, const MeanOptions& opt);

/// Checks for the interior derivative estimates on a pair of balls.
struct BoundReport {
  double d = 0.0;                  // dist(D', ∂D)
  double max_gradient = 0.0;       // max over sampled D' points and axes of |∂_i u|
  double sup_abs = 0.0;            // sampled sup over D of |u|
  double bound = 0.0;              // (m / d) sup_abs
  bool bound_holds = false;
  double min_value = 0.0;          // sampled inf over D of u
  bool nonnegative_checked = false;
  Point x0;
  double d0 = 0.0;                 // dist(x0, ∂D)
  double gradient_x0 = 0.0;        // max_i |∂_i u(x0)|
  double nonnegative_bound = 0.0;  // (m / d0) u(x0)
  bool nonnegative_holds = true;   // vacuous when not checked
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  bool all_hold() const noexcept { return bound_holds && nonnegative_holds; }
};

/// Samples n points in D' (gradient maximum) and n points each on ∂D and in
/// D (sup of |u|). Requires closure(D') ⊂ D and x0 ∈ D.
BoundReport derivative_bound_check(const HarmonicFn& u, const Ball& D, const Ball& Dprime,
                                   const Point& x0, std::size_t n_samples = 10'000,
                                   std::uint64_t seed = 0);

/// Compares the weighted mean of u under a custom (or any) weight with
/// c_w u(x), where c_w comes from the numeric radial primitive. Throws
/// DivergenceError when the weight fails the integrability check.
IdentityReport conjecture_probe(const HarmonicFn& u, const Ball& b, const Weight& w,
                                double tol = 1e-7, const MeanOptions& opt = {});

}  // namespace wmean
