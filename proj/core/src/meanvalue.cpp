#include "wmean/meanvalue.hpp"

#include <algorithm>
#include <cmath>

#include "wmean/error.hpp"
#include "wmean/montecarlo.hpp"

namespace wmean {
namespace {

void check_match(const Ball& b, int m) {
  if (b.dim() != m) throw InvalidInput("function and ball dimensions differ");
}

// One pass over the ball computing (1/|B|) ∫ u w_k for each weight and, when
// requested, (m/|B|) ∫ u (y - x)_i / |y - x|^2 for every axis.
std::vector<Estimate> ball_pass(const ScalarField& u, const Ball& b,
                                const std::vector<Weight>& weights, bool with_gradient,
                                const MeanOptions& opt) {
  const int m = b.dim();
  for (const auto& w : weights) {
    if (w.dim() != m) throw InvalidInput("weight dimension does not match the ball");
  }
  const std::size_t nw = weights.size();
  const std::size_t channels = nw + (with_gradient ? static_cast<std::size_t>(m) : 0);
  const double r = b.radius();
  const double grad_scale = static_cast<double>(m);

  if (!has_product_rule(m)) {
    return mc_ball_mean_channels(
        b, opt.mc_n, opt.seed, channels, [&](const Point& y, double rho, std::span<double> out) {
          if (rho < 1e-12 * r) return;
          const double uy = u(y);
          for (std::size_t k = 0; k < nw; ++k) out[k] = weights[k].value(rho, r) * uy;
          if (with_gradient) {
            const double s = grad_scale * uy / (rho * rho);
            for (int i = 0; i < m; ++i) out[nw + i] = s * (y[i] - b.center()[i]);
          }
        });
  }

  const auto sphere = opt.rules.sphere_rule(m);
  const auto radial = opt.rules.radial_rule(r);
  // Radial factors depend only on the node, so tabulate them once.
  auto tabulate = [&](const std::vector<RadialPanelRule::Node>& nodes) {
    std::vector<double> t(nodes.size() * channels, 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double rho = nodes[i].rho;
      for (std::size_t k = 0; k < nw; ++k) t[i * channels + k] = weights[k].value(rho, r);
      if (with_gradient) {
        for (int a = 0; a < m; ++a) t[i * channels + nw + a] = 1.0 / rho;
      }
    }
    return t;
  };
  const auto full = tabulate(radial.nodes());
  const auto half = tabulate(radial.half_nodes());

  auto est = integrate_ball_channels(
      b, sphere, radial, channels, [&](const BallSample& s, std::span<double> out) {
        const double uy = u(s.y);
        const double* k = (s.half ? half.data() : full.data()) + s.node * channels;
        for (std::size_t c = 0; c < nw; ++c) out[c] = k[c] * uy;
        if (with_gradient) {
          for (int a = 0; a < m; ++a) out[nw + a] = k[nw + a] * uy * s.direction[a];
        }
      });
  const double inv_vol = 1.0 / b.volume();
  for (std::size_t c = 0; c < channels; ++c) {
    const double scale = c < nw ? inv_vol : grad_scale * inv_vol;
    est[c].value *= scale;
    est[c].error *= scale;
  }
  return est;
}

}  // namespace

bool has_product_rule(int m) noexcept { return m == 2 || m == 3; }

TestFunction TestFunction::from(const HarmonicFn& u) { return {u.name(), u.field()}; }

TestFunction TestFunction::squared_norm(int m) {
  check_dimension(m);
  return {"control:r2", [](const Point& y) { return y.norm_squared(); }};
}

Estimate spherical_mean(const ScalarField& u, const Ball& b, const MeanOptions& opt) {
  const int m = b.dim();
  if (!has_product_rule(m)) return mc_sphere_mean(u, b, opt.mc_n, opt.seed);
  const auto sphere = opt.rules.sphere_rule(m);
  auto on_sphere = [&](const Point& theta) { return u(axpy(b.center(), b.radius(), theta)); };
  const double area = sphere_area(m);
  Estimate e;
  e.value = sphere.integrate(on_sphere) / area;
  const auto coarse = sphere.coarsened();
  e.error = std::abs(e.value - coarse.integrate(on_sphere) / area);
  e.method = Estimate::Method::ProductRule;
  e.n_evals = sphere.size() + coarse.size();
  return e;
}

Estimate volume_mean(const ScalarField& u, const Ball& b, const MeanOptions& opt) {
  const int m = b.dim();
  if (!has_product_rule(m)) {
    return mc_ball_mean_channels(
               b, opt.mc_n, opt.seed, 1,
               [&](const Point& y, double, std::span<double> out) { out[0] = u(y); })
        .front();
  }
  auto e = integrate_ball(u, b, opt.rules.sphere_rule(m), opt.rules.smooth_radial_rule(b.radius()));
  const double inv_vol = 1.0 / b.volume();
  e.value *= inv_vol;
  e.error *= inv_vol;
  return e;
}

Estimate weighted_mean(const ScalarField& u, const Ball& b, const Weight& w,
                       const MeanOptions& opt) {
  return ball_pass(u, b, {w}, false, opt).front();
}

std::vector<Estimate> weighted_means(const ScalarField& u, const Ball& b,
                                     const std::vector<Weight>& weights, const MeanOptions& opt) {
  return ball_pass(u, b, weights, false, opt);
}

Estimate gradient_weighted(const ScalarField& u, const Ball& b, int axis, const MeanOptions& opt) {
  if (axis < 0 || axis >= b.dim()) throw InvalidInput("gradient axis out of range");
  return ball_pass(u, b, {}, true, opt)[static_cast<std::size_t>(axis)];
}

std::vector<Estimate> gradient_weighted_all(const ScalarField& u, const Ball& b,
                                            const MeanOptions& opt) {
  return ball_pass(u, b, {}, true, opt);
}

std::vector<Estimate> weighted_means_and_gradient(const ScalarField& u, const Ball& b,
                                                  const std::vector<Weight>& weights,
                                                  const MeanOptions& opt) {
  return ball_pass(u, b, weights, true, opt);
}

IdentityReport make_report(std::string identity, const std::string& function,
                           const std::string& weight, const Ball& b, double claimed,
                           const Estimate& computed, double tol, const MeanOptions& opt) {
  if (!(tol >= 0.0)) throw InvalidInput("tolerance must be nonnegative");
  IdentityReport rep{std::move(identity), function, weight, b, -1, claimed, computed,
                     0.0, 0.0, false, opt};
  rep.residual = std::abs(claimed - computed.value);
  rep.tolerance = computed.method == Estimate::Method::MonteCarlo
                      ? std::max(tol, 3.0 * computed.error)
                      : tol;
  rep.pass = rep.residual <= rep.tolerance;
  return rep;
}

IdentityReport verify_spherical(const TestFunction& u, const Ball& b, double tol,
                                const MeanOptions& opt) {
  return make_report("spherical_mean", u.name, "", b, u.value(b.center()),
                     spherical_mean(u.value, b, opt), tol, opt);
}

IdentityReport verify_volume(const TestFunction& u, const Ball& b, double tol,
                             const MeanOptions& opt) {
  return make_report("volume_mean", u.name, "", b, u.value(b.center()),
                     volume_mean(u.value, b, opt), tol, opt);
}

IdentityReport verify_identity(const TestFunction& u, const Ball& b, const Weight& w,
                               double tol, const MeanOptions& opt) {
  const double claimed = w.mean_constant(b.radius()) * u.value(b.center());
  return make_report("weighted_mean", u.name, w.spec(), b, claimed,
                     weighted_mean(u.value, b, w, opt), tol, opt);
}

IdentityReport verify_gradient(const HarmonicFn& u, const Ball& b, int axis, double tol,
                               const MeanOptions& opt) {
  check_match(b, u.dim());
  const auto est = gradient_weighted(u.field(), b, axis, opt);
  auto rep = make_report("gradient", u.name(), "", b, u.gradient(b.center())[axis], est, tol, opt);
  rep.axis = axis;
  return rep;
}

BoundReport derivative_bound_check(const HarmonicFn& u, const Ball& D, const Ball& Dprime,
                                   const Point& x0, std::size_t n_samples, std::uint64_t seed) {
  const int m = u.dim();
  check_match(D, m);
  check_match(Dprime, m);
  if (x0.dim() != m) throw InvalidInput("x0 dimension does not match");
  if (n_samples < 1) throw InvalidInput("derivative bound check needs samples");
  const double d = D.radius() - distance(D.center(), Dprime.center()) - Dprime.radius();
  if (!(d > 0.0)) throw InvalidInput("closure of D' is not contained in D");
  const double d0 = D.radius() - distance(D.center(), x0);
  if (!(d0 > 0.0)) throw InvalidInput("x0 does not lie in D");

  BoundReport rep;
  rep.d = d;
  rep.x0 = x0;
  rep.d0 = d0;
  rep.n_samples = n_samples;
  rep.seed = seed;

  auto max_abs_gradient = [&](const Point& y) {
    const Point g = u.gradient(y);
    double best = 0.0;
    for (int i = 0; i < m; ++i) best = std::max(best, std::abs(g[i]));
    return best;
  };
  auto in_ball = [m](const Ball& b, McRng& rng) {
    const Point dir = sample_unit_sphere(m, rng);
    return axpy(b.center(), b.radius() * std::pow(rng.uniform(), 1.0 / m), dir);
  };

  McRng inner(stream_seed(seed, 0));
  rep.max_gradient = max_abs_gradient(Dprime.center());
  for (std::size_t k = 0; k < n_samples; ++k) {
    rep.max_gradient = std::max(rep.max_gradient, max_abs_gradient(in_ball(Dprime, inner)));
  }

  // Sup and inf over D: boundary points dominate by the maximum principle;
  // interior points are added for functions that are not continuous up to ∂D.
  McRng boundary(stream_seed(seed, 1));
  McRng interior(stream_seed(seed, 2));
  double sup_abs = std::abs(u.value(D.center()));
  double min_value = u.value(D.center());
  auto visit = [&](const Point& y) {
    const double v = u.value(y);
    sup_abs = std::max(sup_abs, std::abs(v));
    min_value = std::min(min_value, v);
  };
  for (std::size_t k = 0; k < n_samples; ++k) {
    visit(axpy(D.center(), D.radius(), sample_unit_sphere(m, boundary)));
    visit(in_ball(D, interior));
  }
  rep.sup_abs = sup_abs;
  rep.min_value = min_value;
  rep.bound = m / d * sup_abs;
  rep.bound_holds = rep.max_gradient <= rep.bound;

  rep.gradient_x0 = max_abs_gradient(x0);
  if (min_value >= 0.0) {
    rep.nonnegative_checked = true;
    rep.nonnegative_bound = m / d0 * u.value(x0);
    rep.nonnegative_holds = rep.gradient_x0 <= rep.nonnegative_bound;
  }
  return rep;
}

IdentityReport conjecture_probe(const HarmonicFn& u, const Ball& b, const Weight& w, double tol,
                                const MeanOptions& opt) {
  check_match(b, u.dim());
  const double r = b.radius();
  const auto validity = validate_weight(w, r);
  if (!validity.integrable) {
    throw DivergenceError("weight '" + w.spec() + "' failed the integrability check: " +
                          validity.detail);
  }
  const int m = b.dim();
  const double c_w = m * w.radial_primitive_numeric(r, r).value / std::pow(r, m);
  return make_report("probe", u.name(), w.spec(), b, c_w * u.value(b.center()),
                     weighted_mean(u.field(), b, w, opt), tol, opt);
}

}  // namespace wmean
