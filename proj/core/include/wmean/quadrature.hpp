#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wmean/geometry.hpp"
#include "wmean/point.hpp"

namespace wmean {

/// A numeric value with an error estimate. For product rules the error is a
/// convergence heuristic (difference against a coarser rule); for Monte Carlo
/// it is the sample standard error.
struct Estimate {
  enum class Method { ProductRule, MonteCarlo };

  double value = 0.0;
  double error = 0.0;
  Method method = Method::ProductRule;
  std::size_t n_evals = 0;
};

std::string method_name(Estimate::Method m);

using ScalarField = std::function<double(const Point&)>;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// Quadrature rule on the unit sphere S^{m-1}, m in {2, 3}.
class SphereRule {
 public:
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// A rule of roughly half the resolution, used for error estimates.
  SphereRule coarsened() const;

  /// Σ weight * f(node), compensated, in node order.
  double integrate(const std::function<double(const Point&)>& f) const;

  std::string describe() const;

 private:
  friend SphereRule circle_rule(int n);
  friend SphereRule sphere_rule_3d(int n_polar, int n_azimuth);

  int dim_ = 0;
  int n_a_ = 0;  // circle nodes, or azimuth count in 3D
  int n_p_ = 0;  // polar count in 3D
  std::vector<Point> nodes_;
  std::vector<double> weights_;
};

/// n equispaced nodes on the unit circle with weights 2 pi / n; n >= 4 even.
SphereRule circle_rule(int n);

/// Gauss-Legendre in cos(polar angle) times the trapezoid rule in azimuth.
SphereRule sphere_rule_3d(int n_polar, int n_azimuth);

/// Composite Gauss-Legendre rule on (r * ratio^panels, r] with panels graded
/// geometrically towards 0. Every rule carries a second node set with half
/// the points per panel for error estimation.
class RadialPanelRule {
 public:
  struct Node {
    double rho;
    double weight;
  };

  /// Innermost cutoff r * ratio^panels must be <= 1e-30 * r.
  static RadialPanelRule graded(double r, int panels, int nodes_per_panel, double ratio);

  double radius() const noexcept { return r_; }
  int panels() const noexcept { return panels_; }
  int nodes_per_panel() const noexcept { return nodes_per_panel_; }
  double grading_ratio() const noexcept { return ratio_; }
  double cutoff() const noexcept { return cutoff_; }

  /// Full rule nodes, innermost panel first.
  const std::vector<Node>& nodes() const noexcept { return full_; }
  /// Half-density nodes for error estimation, innermost panel first.
  const std::vector<Node>& half_nodes() const noexcept { return half_; }

  /// Same grading parameters for a different outer radius.
  RadialPanelRule rescaled(double r) const;

  std::string describe() const;

 private:
  double r_ = 0.0;
  int panels_ = 0;
  int nodes_per_panel_ = 0;
  double ratio_ = 0.0;
  double cutoff_ = 0.0;
  std::vector<Node> full_;
  std::vector<Node> half_;
};

/// Rule sizes shared by every deterministic operation. `sphere_n` is the
/// circle node count; in 3D the product rule is (sphere_n / 8, sphere_n / 4).
struct RuleConfig {
  int sphere_n = 256;
  int radial_panels = 100;
  int radial_nodes = 16;
  double grading_ratio = 0.5;

  SphereRule sphere_rule(int m) const;
  /// Graded rule for integrands that may be singular at the center.
  RadialPanelRule radial_rule(double r) const;
  /// Rule for integrands smooth up to the center: 10 panels with ratio 1e-3.
  RadialPanelRule smooth_radial_rule(double r) const;
};

/// ∫_0^r f(rho) drho by the panel rule, summed innermost panel first.
/// Throws EvaluationFailure if f is not finite at a node.
Estimate radial_integrate(const std::function<double(double)>& f, const RadialPanelRule& rule);

/// Integrand channels for integrate_ball_channels. `node` indexes
/// RadialPanelRule::nodes() when `half` is false and half_nodes() otherwise,
/// so callers can tabulate purely radial factors once per rule.
struct BallSample {
  const Point& y;
  const Point& direction;
  double rho;
  std::size_t node;
  bool half;
};
using ChannelVisitor = std::function<void(const BallSample&, std::span<double>)>;

/// ∫_{B} g_k(y) dy for `channels` integrands at once, by the polar product
/// rule Σ_θ w_θ ∫_0^r rho^{m-1} g_k(c + rho θ) drho. The visitor fills one
/// value per channel. Directions are processed in parallel and reduced in a
/// fixed order.
std::vector<Estimate> integrate_ball_channels(const Ball& ball, const SphereRule& sphere,
                                              const RadialPanelRule& radial,
                                              std::size_t channels,
                                              const ChannelVisitor& visitor);

Estimate integrate_ball(const ScalarField& g, const Ball& ball, const SphereRule& sphere,
                        const RadialPanelRule& radial);

/// (1/m) Σ_θ w_θ rho(θ)^m with the given sphere rule.
double star_volume(const StarDomain& domain, const SphereRule& sphere);
/// star_volume with RuleConfig defaults.
double star_volume(const StarDomain& domain);

}  // namespace wmean
