#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmean/geometry.hpp"
#include "wmean/quadrature.hpp"
#include "wmean/weights.hpp"

namespace wmean {

/// Rule sizes and Monte Carlo settings for the domain functional.
struct CharacterizeOptions {
  RuleConfig rules;
  std::size_t mc_n = 1'000'000;
  std::uint64_t seed = 0;
};

/// Φ_w(D, x, r) = (1/|D|) ∫_D w(|x - y|, r) dy.
///
/// Star domains use exact radial integration along each sphere direction:
/// (1/|D|) Σ_θ w_θ W(ρ_x(θ)), with W the radial primitive. When x is not the
/// anchor, ρ_x is found by casting rays from x; if some ray crosses the
/// boundary more than once (D not star-shaped about x at the scan
/// resolution) the Monte Carlo path is used instead. Requires x ∈ D.
Estimate functional(const StarDomain& D, const Point& x, double r, const Weight& w,
                    const CharacterizeOptions& opt = {});

/// Monte Carlo ratio estimator over the bounding box: the mean of
/// w(|x - y|, r) over samples that hit D. Samples with |x - y| < 1e-12 are
/// skipped. Requires x ∈ D.
Estimate functional(const ImplicitDomain& D, const Point& x, double r, const Weight& w,
                    const CharacterizeOptions& opt = {});

/// c_w(r) - Φ_w(D, x, r) with the volume condition |D| >= |B_r|.
struct Deficiency {
  double value = 0.0;
  Estimate phi;
  double c_w = 0.0;
  double domain_volume = 0.0;
  double r = 0.0;
  bool volume_condition_ok = false;

  /// Error estimate of value (that of phi).
  double error() const noexcept { return phi.error; }
  /// Unset when the volume condition fails; otherwise whether the value is
  /// zero within max(tol, 3 * error()).
  std::optional<bool> ball_verdict(double tol) const;
};

Deficiency deficiency(const StarDomain& D, const Point& x, double r, const Weight& w,
                      const CharacterizeOptions& opt = {});
Deficiency deficiency(const ImplicitDomain& D, const Point& x, double r, const Weight& w,
                      const CharacterizeOptions& opt = {});

/// Radius of the ball with the same volume: (m |D| / omega_m)^{1/m}.
double matched_radius(const StarDomain& D, const RuleConfig& rules = {});
/// Same with |D| estimated by Monte Carlo.
double matched_radius(const ImplicitDomain& D, std::size_t n, std::uint64_t seed);

/// Distance from x to the boundary along a unit direction, found by a sign
/// scan and bisection. Unset when the ray crosses the boundary more than
/// once. Requires x ∈ D.
std::optional<double> ray_exit(const StarDomain& D, const Point& x, const Point& direction);

/// Monte Carlo estimates over the sets G_i = D \ closure(B) and
/// G_e = B \ closure(D).
struct DecompositionReport {
  Estimate vol_inner;        // |G_i|
  Estimate vol_outer;        // |G_e|
  Estimate weight_inner;     // ∫_{G_i} w
  Estimate weight_outer;     // ∫_{G_e} w
  Estimate weight_domain;    // ∫_D w
  Estimate weight_ball;      // ∫_B w
  Estimate domain_volume;    // |D|
  double c_w = 0.0;
  double ball_volume = 0.0;  // |B| exact

  // ∫_D w - c_w |B| against ∫_{G_i} w - ∫_{G_e} w. The per-sample difference
  // of both sides is w 1_B, so its estimate and standard error are used.
  double consistency_residual = 0.0;
  double consistency_error = 0.0;
  bool consistency_ok = false;

  bool inner_sign_ok = false;  // ∫_{G_i} w <= 3 stderr
  bool outer_sign_ok = false;  // ∫_{G_e} w >= -3 stderr
  bool inner_empty = false;    // no sample landed in G_i
  bool outer_empty = false;

  std::size_t n = 0;
  std::uint64_t seed = 0;

  bool all_ok() const noexcept { return consistency_ok && inner_sign_ok && outer_sign_ok; }
};

/// Samples the union of the bounding boxes of D and B. Requires the center
/// of B to lie in D.
DecompositionReport proof_decomposition(const ImplicitDomain& D, const Ball& B, const Weight& w,
                                        std::size_t n, std::uint64_t seed);

/// One simplex step of the center search.
struct RecoveryStep {
  int iteration = 0;
  Point best;
  double delta = 0.0;
  double diameter = 0.0;
};

struct RecoveryReport {
  Point center;
  double r = 0.0;
  double delta_min = 0.0;
  double error = 0.0;    // error estimate of the final evaluation
  double tol = 0.0;
  bool is_ball = false;
  bool converged = false;
  int iterations = 0;
  std::size_t evaluations = 0;
  std::string final_method;  // product_rule or mc
  std::vector<RecoveryStep> trace;
};

/// Minimizes δ(x) = deficiency(D, x, matched_radius(D), w) over x with a
/// Nelder-Mead simplex (initial edge 0.1 rho_min; stops when the simplex
/// diameter drops below 1e-8 or after 500 iterations). Candidates outside D
/// are penalized. is_ball ⇔ δ_min <= max(tol, 3 error).
RecoveryReport recover_ball(const StarDomain& D, const Weight& w, const Point& x0,
                            double tol = 1e-7, const CharacterizeOptions& opt = {});

struct SweepRow {
  double amplitude = 0.0;
  double r = 0.0;
  double deficiency = 0.0;
  double error = 0.0;
  /// δ within 1e-10 of 0 for a = 0, δ > 0 otherwise.
  bool expected_sign = false;
};

/// Deficiency of the planar domains ρ(θ) = r0 + a cos(kθ) about the origin
/// at their matched radii. Requires |a| < r0 and k >= 1.
std::vector<SweepRow> perturbation_sweep(double r0, const std::vector<double>& amplitudes,
                                         int mode, const Weight& w,
                                         const CharacterizeOptions& opt = {});

}  // namespace wmean
