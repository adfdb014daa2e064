#include "wmean/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "wmean/error.hpp"
#include "wmean/parallel.hpp"
#include "wmean/summation.hpp"

namespace wmean {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::string method_name(Estimate::Method m) {
  return m == Estimate::Method::ProductRule ? "product_rule" : "mc";
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("Gauss-Legendre rule needs at least one node");
  GaussLegendre gl;
  if (n == 1) return {{0.0}, {2.0}};
  gl.nodes.assign(static_cast<std::size_t>(n), 0.0);
  gl.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    gl.nodes[lo] = -x;
    gl.nodes[hi] = x;
    gl.weights[lo] = w;
    gl.weights[hi] = w;
  }
  if (n % 2 == 1) gl.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return gl;
}

SphereRule circle_rule(int n) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidInput("circle rule needs an even node count >= 4, got " + std::to_string(n));
  }
  SphereRule rule;
  rule.dim_ = 2;
  rule.n_a_ = n;
  rule.nodes_.resize(static_cast<std::size_t>(n));
  rule.weights_.assign(static_cast<std::size_t>(n), kTwoPi / n);
  const int half = n / 2;
  for (int j = 0; j < half; ++j) {
    const double a = kTwoPi * j / n;
    rule.nodes_[static_cast<std::size_t>(j)] = Point{std::cos(a), std::sin(a)};
    rule.nodes_[static_cast<std::size_t>(j + half)] = Point{-std::cos(a), -std::sin(a)};
  }
  return rule;
}

SphereRule sphere_rule_3d(int n_polar, int n_azimuth) {
  if (n_polar < 2 || n_azimuth < 4 || n_azimuth % 2 != 0) {
    throw InvalidInput("3D sphere rule needs n_polar >= 2 and even n_azimuth >= 4");
  }
  SphereRule rule;
  rule.dim_ = 3;
  rule.n_p_ = n_polar;
  rule.n_a_ = n_azimuth;
  const auto gl = gauss_legendre(n_polar);
  const double dphi = kTwoPi / n_azimuth;
  const int half = n_azimuth / 2;
  std::vector<double> cphi(static_cast<std::size_t>(n_azimuth));
  std::vector<double> sphi(static_cast<std::size_t>(n_azimuth));
  for (int j = 0; j < half; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    cphi[ju] = std::cos(dphi * j);
    sphi[ju] = std::sin(dphi * j);
    cphi[ju + static_cast<std::size_t>(half)] = -cphi[ju];
    sphi[ju + static_cast<std::size_t>(half)] = -sphi[ju];
  }
  rule.nodes_.reserve(static_cast<std::size_t>(n_polar * n_azimuth));
  rule.weights_.reserve(static_cast<std::size_t>(n_polar * n_azimuth));
  for (int i = 0; i < n_polar; ++i) {
    const double z = gl.nodes[static_cast<std::size_t>(i)];
    const double s = std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z)));
    for (int j = 0; j < n_azimuth; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      rule.nodes_.push_back(Point{s * cphi[ju], s * sphi[ju], z});
      rule.weights_.push_back(gl.weights[static_cast<std::size_t>(i)] * dphi);
    }
  }
  return rule;
}

SphereRule SphereRule::coarsened() const {
  if (dim_ == 2) {
    const int n = std::max(4, n_a_ / 2);
    return circle_rule(n % 2 == 0 ? n : n + 1);
  }
  const int na = std::max(4, n_a_ / 2);
  return sphere_rule_3d(std::max(2, n_p_ / 2), na % 2 == 0 ? na : na + 1);
}

double SphereRule::integrate(const std::function<double(const Point&)>& f) const {
  CompensatedSum sum;
  for (std::size_t i = 0; i < nodes_.size(); ++i) sum.add(weights_[i] * f(nodes_[i]));
  return sum.value();
}

std::string SphereRule::describe() const {
  if (dim_ == 2) return "circle(" + std::to_string(n_a_) + ")";
  return "sphere3d(" + std::to_string(n_p_) + "," + std::to_string(n_a_) + ")";
}

RadialPanelRule RadialPanelRule::graded(double r, int panels, int nodes_per_panel,
                                        double ratio) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("radial rule needs r > 0");
  if (panels < 1) throw InvalidInput("radial rule needs at least one panel");
  if (nodes_per_panel < 2) throw InvalidInput("radial rule needs >= 2 nodes per panel");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw InvalidInput("radial grading ratio must lie in (0, 1)");
  }
  const double rel_cutoff = std::pow(ratio, panels);
  if (rel_cutoff > 1e-30 * (1.0 + 1e-9)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "radial rule cutoff ratio^panels = %.3g exceeds 1e-30; use more panels "
                  "or a smaller grading ratio",
                  rel_cutoff);
    throw InvalidInput(buf);
  }

  RadialPanelRule rule;
  rule.r_ = r;
  rule.panels_ = panels;
  rule.nodes_per_panel_ = nodes_per_panel;
  rule.ratio_ = ratio;
  rule.cutoff_ = r * rel_cutoff;

  const auto full = gauss_legendre(nodes_per_panel);
  const auto half = gauss_legendre(std::max(1, nodes_per_panel / 2));
  auto map_panel = [](const GaussLegendre& gl, double a, double b, std::vector<Node>& out) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      out.push_back({mid + hw * gl.nodes[i], hw * gl.weights[i]});
    }
  };
  rule.full_.reserve(static_cast<std::size_t>(panels * nodes_per_panel));
  for (int k = 0; k < panels; ++k) {
    // Panel k (innermost first) is [r ratio^{L-k}, r ratio^{L-k-1}].
    const double a = r * std::pow(ratio, panels - k);
    const double b = (k == panels - 1) ? r : r * std::pow(ratio, panels - k - 1);
    map_panel(full, a, b, rule.full_);
    map_panel(half, a, b, rule.half_);
  }
  return rule;
}

RadialPanelRule RadialPanelRule::rescaled(double r) const {
  return graded(r, panels_, nodes_per_panel_, ratio_);
}

std::string RadialPanelRule::describe() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "graded(panels=%d,nodes=%d,ratio=%.17g)", panels_,
                nodes_per_panel_, ratio_);
  return buf;
}

SphereRule RuleConfig::sphere_rule(int m) const {
  if (m == 2) return circle_rule(sphere_n);
  if (m == 3) {
    int na = std::max(4, sphere_n / 4);
    if (na % 2 != 0) ++na;
    return sphere_rule_3d(std::max(2, sphere_n / 8), na);
  }
  throw InvalidInput("deterministic sphere rules exist for m = 2, 3 only; got m = " +
                     std::to_string(m));
}

RadialPanelRule RuleConfig::radial_rule(double r) const {
  return RadialPanelRule::graded(r, radial_panels, radial_nodes, grading_ratio);
}

RadialPanelRule RuleConfig::smooth_radial_rule(double r) const {
  return RadialPanelRule::graded(r, 10, radial_nodes, 1e-3);
}

Estimate radial_integrate(const std::function<double(double)>& f, const RadialPanelRule& rule) {
  auto sum_over = [&](const std::vector<RadialPanelRule::Node>& nodes) {
    CompensatedSum s;
    for (const auto& n : nodes) {
      const double v = f(n.rho);
      if (!std::isfinite(v)) {
        throw EvaluationFailure("radial integrand is not finite", n.rho);
      }
      s.add(n.weight * v);
    }
    return s.value();
  };
  Estimate e;
  e.value = sum_over(rule.nodes());
  e.error = std::abs(e.value - sum_over(rule.half_nodes()));
  e.method = Estimate::Method::ProductRule;
  e.n_evals = rule.nodes().size() + rule.half_nodes().size();
  return e;
}

std::vector<Estimate> integrate_ball_channels(const Ball& ball, const SphereRule& sphere,
                                              const RadialPanelRule& radial,
                                              std::size_t channels,
                                              const ChannelVisitor& visitor) {
  const int m = ball.dim();
  if (sphere.dim() != m) {
    throw InvalidInput("sphere rule dimension does not match the ball");
  }
  const RadialPanelRule rule =
      radial.radius() == ball.radius() ? radial : radial.rescaled(ball.radius());

  auto tabulate = [m](const std::vector<RadialPanelRule::Node>& nodes) {
    std::vector<double> f(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      f[i] = std::pow(nodes[i].rho, m - 1) * nodes[i].weight;
    }
    return f;
  };
  const auto full_factor = tabulate(rule.nodes());
  const auto half_factor = tabulate(rule.half_nodes());

  const std::size_t dirs = sphere.size();
  // Per direction: channels full sums followed by channels half sums.
  std::vector<double> partial(dirs * 2 * channels, 0.0);
  parallel_for(dirs, [&](std::size_t d) {
    const Point& theta = sphere.nodes()[d];
    std::vector<CompensatedSum> acc(2 * channels);
    std::vector<double> vals(channels, 0.0);
    auto sweep = [&](const std::vector<RadialPanelRule::Node>& nodes,
                     const std::vector<double>& factor, bool half) {
      const std::size_t off = half ? channels : 0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double rho = nodes[i].rho;
        const Point y = axpy(ball.center(), rho, theta);
        std::fill(vals.begin(), vals.end(), 0.0);
        visitor(BallSample{y, theta, rho, i, half}, vals);
        for (std::size_t k = 0; k < channels; ++k) {
          if (!std::isfinite(vals[k])) {
            throw EvaluationFailure("ball integrand is not finite", rho);
          }
          acc[off + k].add(factor[i] * vals[k]);
        }
      }
    };
    sweep(rule.nodes(), full_factor, false);
    sweep(rule.half_nodes(), half_factor, true);
    for (std::size_t k = 0; k < 2 * channels; ++k) {
      partial[d * 2 * channels + k] = acc[k].value();
    }
  });

  std::vector<Estimate> out(channels);
  for (std::size_t k = 0; k < channels; ++k) {
    CompensatedSum full;
    CompensatedSum half;
    for (std::size_t d = 0; d < dirs; ++d) {
      const double w = sphere.weights()[d];
      full.add(w * partial[d * 2 * channels + k]);
      half.add(w * partial[d * 2 * channels + channels + k]);
    }
    out[k].value = full.value();
    out[k].error = std::abs(full.value() - half.value());
    out[k].method = Estimate::Method::ProductRule;
    out[k].n_evals = dirs * (rule.nodes().size() + rule.half_nodes().size());
  }
  return out;
}

Estimate integrate_ball(const ScalarField& g, const Ball& ball, const SphereRule& sphere,
                        const RadialPanelRule& radial) {
  return integrate_ball_channels(ball, sphere, radial, 1,
                                 [&](const BallSample& s, std::span<double> out) {
                                   out[0] = g(s.y);
                                 })
      .front();
}

double star_volume(const StarDomain& domain, const SphereRule& sphere) {
  const int m = domain.dim();
  if (sphere.dim() != m) throw InvalidInput("sphere rule dimension does not match the domain");
  return sphere.integrate([&](const Point& dir) { return std::pow(domain.radius_at(dir), m); }) /
         m;
}

double star_volume(const StarDomain& domain) {
  return star_volume(domain, RuleConfig{}.sphere_rule(domain.dim()));
}

}  // namespace wmean
