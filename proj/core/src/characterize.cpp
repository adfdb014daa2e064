#include "wmean/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wmean/error.hpp"
#include "wmean/montecarlo.hpp"
#include "wmean/summation.hpp"

namespace wmean {
namespace {

constexpr int kRayScanSteps = 128;
constexpr int kNelderMeadMaxIter = 500;
constexpr double kNelderMeadMinDiameter = 1e-8;
constexpr double kOutsidePenalty = 1e30;

void require_inside(bool inside) {
  if (!inside) throw InvalidInput("the point x does not lie in D");
}

double primitive_error(const Weight& w, double T, double r) {
  return w.has_closed_form() ? 0.0 : w.radial_primitive_numeric(T, r).error;
}

struct StarSums {
  double phi = 0.0;
  double volume = 0.0;
  double primitive_error = 0.0;  // includes the rounding floor
  std::size_t n_evals = 0;
  bool star_shaped = true;
};

// Σ_θ w_θ W(ρ_x(θ)) / Σ_θ w_θ ρ_x(θ)^m / m over one sphere rule.
StarSums star_sums(const StarDomain& D, const Point& x, double r, const Weight& w,
                   const SphereRule& sphere) {
  const int m = D.dim();
  const bool at_anchor = x == D.anchor();
  const std::size_t n = sphere.size();
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (at_anchor) {
      rho[i] = D.radius_at(sphere.nodes()[i]);
    } else {
      const auto s = ray_exit(D, x, sphere.nodes()[i]);
      if (!s) return StarSums{0.0, 0.0, 0.0, 0, false};
      rho[i] = *s;
    }
  }
  CompensatedSum num;
  CompensatedSum vol;
  double magnitude = 0.0;
  StarSums out;
  for (std::size_t i = 0; i < n; ++i) {
    const double wt = sphere.weights()[i];
    const double term = wt * w.radial_primitive(rho[i], r);
    num.add(term);
    magnitude += std::abs(term);
    vol.add(wt * std::pow(rho[i], m) / m);
    out.primitive_error += wt * primitive_error(w, rho[i], r);
  }
  out.phi = num.value() / vol.value();
  out.volume = vol.value();
  // Rounding floor, so a spectrally converged rule never reports zero error.
  out.primitive_error =
      (out.primitive_error + 16.0 * std::numeric_limits<double>::epsilon() * magnitude) /
      vol.value();
  out.n_evals = n;
  return out;
}

struct McFunctional {
  Estimate phi;
  Estimate volume;
};

McFunctional mc_functional(const ImplicitDomain& D, const Point& x, double r, const Weight& w,
                           std::size_t n, std::uint64_t seed) {
  // Channels: w 1_D, w^2 1_D, 1_D.
  const auto est = mc_integrate_box_channels(
      D.bbox(), n, seed, 3, [&](const Point& y, std::span<double> out) {
        if (!D.contains(y)) return;
        out[2] = 1.0;
        const double t = distance(x, y);
        if (t < 1e-12) return;
        const double v = w.value(t, r);
        out[0] = v;
        out[1] = v * v;
      });
  const double box = D.bbox().volume();
  const double p = est[2].value / box;
  if (p == 0.0) throw Error("domain not detected in bbox");
  const double mean = est[0].value / box / p;
  const double second = est[1].value / box / p;
  const double hits = p * static_cast<double>(n);
  McFunctional out;
  out.phi.value = mean;
  out.phi.error = std::sqrt(std::max(0.0, second - mean * mean) / hits);
  out.phi.method = Estimate::Method::MonteCarlo;
  out.phi.n_evals = n;
  out.volume = est[2];
  return out;
}

Deficiency make_deficiency(const Weight& w, double r, const Estimate& phi, double volume,
                           double volume_error) {
  Deficiency d;
  d.c_w = w.mean_constant(r);
  d.phi = phi;
  d.value = d.c_w - phi.value;
  d.domain_volume = volume;
  d.r = r;
  const double ball = ball_volume(w.dim(), r);
  d.volume_condition_ok = volume + std::max(volume_error, 1e-10 * ball) >= ball;
  return d;
}

void check_args(int dim, const Point& x, double r, const Weight& w) {
  if (x.dim() != dim || w.dim() != dim) throw InvalidInput("dimension mismatch");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("r must be positive");
}

}  // namespace

std::optional<bool> Deficiency::ball_verdict(double tol) const {
  if (!volume_condition_ok) return std::nullopt;
  return value <= std::max(tol, 3.0 * error());
}

std::optional<double> ray_exit(const StarDomain& D, const Point& x, const Point& direction) {
  const Point& a = D.anchor();
  // Signed gap |y - a| - ρ(y - a): negative inside.
  auto gap = [&](double s) {
    const Point v = axpy(x, s, direction) - a;
    const double len = v.norm();
    if (len == 0.0) return -D.rho_min();
    return len - D.radius_at(v * (1.0 / len));
  };
  const double s_max = distance(x, a) + 1.05 * D.rho_max();
  if (!(gap(0.0) < 0.0)) throw InvalidInput("ray origin does not lie in D");

  int crossings = 0;
  double lo = 0.0;
  double hi = 0.0;
  double g_lo = 0.0;
  double g_hi = 0.0;
  double prev_s = 0.0;
  double prev_g = gap(0.0);
  for (int j = 1; j <= kRayScanSteps; ++j) {
    const double s = s_max * j / kRayScanSteps;
    const double g = gap(s);
    if ((prev_g < 0.0) != (g < 0.0)) {
      ++crossings;
      lo = prev_s;
      hi = s;
      g_lo = prev_g;
      g_hi = g;
    }
    prev_s = s;
    prev_g = g;
  }
  if (crossings != 1) return std::nullopt;

  // Illinois variant of regula falsi on the bracket.
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * s_max;
       ++it) {
    const double c = hi - g_hi * (hi - lo) / (g_hi - g_lo);
    const double gc = gap(c);
    if (gc == 0.0) return c;
    if (gc < 0.0) {
      lo = c;
      g_lo = gc;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    } else {
      hi = c;
      g_hi = gc;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

Estimate functional(const StarDomain& D, const Point& x, double r, const Weight& w,
                    const CharacterizeOptions& opt) {
  check_args(D.dim(), x, r, w);
  require_inside(D.contains(x));
  const auto sphere = opt.rules.sphere_rule(D.dim());
  const auto full = star_sums(D, x, r, w, sphere);
  if (!full.star_shaped) {
    return mc_functional(ImplicitDomain::from_star(D), x, r, w, opt.mc_n, opt.seed).phi;
  }
  const auto coarse = star_sums(D, x, r, w, sphere.coarsened());
  Estimate e;
  e.value = full.phi;
  e.error = full.primitive_error + (coarse.star_shaped ? std::abs(full.phi - coarse.phi) : 0.0);
  e.method = Estimate::Method::ProductRule;
  e.n_evals = full.n_evals + coarse.n_evals;
  return e;
}

Estimate functional(const ImplicitDomain& D, const Point& x, double r, const Weight& w,
                    const CharacterizeOptions& opt) {
  check_args(D.dim(), x, r, w);
  require_inside(D.contains(x));
  return mc_functional(D, x, r, w, opt.mc_n, opt.seed).phi;
}

Deficiency deficiency(const StarDomain& D, const Point& x, double r, const Weight& w,
                      const CharacterizeOptions& opt) {
  const auto phi = functional(D, x, r, w, opt);
  const double volume = star_volume(D, opt.rules.sphere_rule(D.dim()));
  return make_deficiency(w, r, phi, volume, 0.0);
}

Deficiency deficiency(const ImplicitDomain& D, const Point& x, double r, const Weight& w,
                      const CharacterizeOptions& opt) {
  check_args(D.dim(), x, r, w);
  require_inside(D.contains(x));
  const auto mc = mc_functional(D, x, r, w, opt.mc_n, opt.seed);
  return make_deficiency(w, r, mc.phi, mc.volume.value, 3.0 * mc.volume.error);
}

double matched_radius(const StarDomain& D, const RuleConfig& rules) {
  const int m = D.dim();
  if (const auto c = D.constant_radius()) return *c;
  const double volume = star_volume(D, rules.sphere_rule(m));
  return std::pow(m * volume / sphere_area(m), 1.0 / m);
}

double matched_radius(const ImplicitDomain& D, std::size_t n, std::uint64_t seed) {
  const int m = D.dim();
  const auto vol = mc_integrate_box_channels(D.bbox(), n, seed, 1,
                                             [&](const Point& y, std::span<double> out) {
                                               out[0] = D.contains(y) ? 1.0 : 0.0;
                                             });
  if (vol[0].value == 0.0) throw Error("domain not detected in bbox");
  return std::pow(m * vol[0].value / sphere_area(m), 1.0 / m);
}

DecompositionReport proof_decomposition(const ImplicitDomain& D, const Ball& B, const Weight& w,
                                        std::size_t n, std::uint64_t seed) {
  const int m = D.dim();
  if (B.dim() != m || w.dim() != m) throw InvalidInput("dimension mismatch");
  require_inside(D.contains(B.center()));
  const auto box = D.bbox().merged(BoundingBox::around(B));
  const Point& x = B.center();
  const double r = B.radius();

  // Channels: 1_{G_i}, 1_{G_e}, w 1_{G_i}, w 1_{G_e}, w 1_D, w 1_B,
  // w 1_D - w 1_{G_i} + w 1_{G_e}, 1_D.
  const auto est = mc_integrate_box_channels(
      box, n, seed, 8, [&](const Point& y, std::span<double> out) {
        const bool in_d = D.contains(y);
        const double t = distance(x, y);
        const bool in_b = t < r;
        const bool in_closed_b = t <= r;
        if (!in_d && !in_b) return;
        const double v = t < 1e-12 ? 0.0 : w.value(t, r);
        const bool g_i = in_d && !in_closed_b;
        const bool g_e = in_b && !in_d;
        out[0] = g_i ? 1.0 : 0.0;
        out[1] = g_e ? 1.0 : 0.0;
        out[2] = g_i ? v : 0.0;
        out[3] = g_e ? v : 0.0;
        out[4] = in_d ? v : 0.0;
        out[5] = in_b ? v : 0.0;
        out[6] = out[4] - out[2] + out[3];
        out[7] = in_d ? 1.0 : 0.0;
      });

  DecompositionReport rep;
  rep.vol_inner = est[0];
  rep.vol_outer = est[1];
  rep.weight_inner = est[2];
  rep.weight_outer = est[3];
  rep.weight_domain = est[4];
  rep.weight_ball = est[5];
  rep.domain_volume = est[7];
  rep.c_w = w.mean_constant(r);
  rep.ball_volume = B.volume();
  rep.n = n;
  rep.seed = seed;

  rep.consistency_residual = std::abs(est[6].value - rep.c_w * rep.ball_volume);
  rep.consistency_error = est[6].error;
  rep.consistency_ok = rep.consistency_residual <= 3.0 * rep.consistency_error;
  rep.inner_empty = est[0].value == 0.0;
  rep.outer_empty = est[1].value == 0.0;
  rep.inner_sign_ok = rep.weight_inner.value <= 3.0 * rep.weight_inner.error;
  rep.outer_sign_ok = rep.weight_outer.value >= -3.0 * rep.weight_outer.error;
  return rep;
}

RecoveryReport recover_ball(const StarDomain& D, const Weight& w, const Point& x0, double tol,
                            const CharacterizeOptions& opt) {
  const int m = D.dim();
  if (x0.dim() != m || w.dim() != m) throw InvalidInput("dimension mismatch");
  if (!(tol >= 0.0)) throw InvalidInput("tolerance must be nonnegative");
  require_inside(D.contains(x0));

  RecoveryReport rep;
  rep.r = matched_radius(D, opt.rules);
  rep.tol = tol;
  const double c_w = w.mean_constant(rep.r);
  const auto sphere = opt.rules.sphere_rule(m);

  std::size_t evals = 0;
  auto objective = [&](const Point& x) {
    const std::size_t index = evals++;
    if (!D.contains(x)) return kOutsidePenalty;
    const auto s = star_sums(D, x, rep.r, w, sphere);
    if (s.star_shaped) return c_w - s.phi;
    return c_w - mc_functional(ImplicitDomain::from_star(D), x, rep.r, w, opt.mc_n,
                               stream_seed(opt.seed, index))
                     .phi.value;
  };

  const double edge = 0.1 * D.rho_min();
  std::vector<Point> v{x0};
  for (int i = 0; i < m; ++i) v.push_back(x0 + Point::unit(m, i) * edge);
  std::vector<double> f;
  for (const auto& p : v) f.push_back(objective(p));

  auto order = [&] {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    std::vector<Point> v2;
    std::vector<double> f2;
    for (auto i : idx) {
      v2.push_back(v[i]);
      f2.push_back(f[i]);
    }
    v = std::move(v2);
    f = std::move(f2);
  };

  const std::size_t worst = static_cast<std::size_t>(m);
  int iter = 0;
  for (; iter < kNelderMeadMaxIter; ++iter) {
    order();
    double diameter = 0.0;
    for (std::size_t j = 1; j < v.size(); ++j) diameter = std::max(diameter, distance(v[j], v[0]));
    rep.trace.push_back({iter, v[0], f[0], diameter});
    if (diameter < kNelderMeadMinDiameter) {
      rep.converged = true;
      break;
    }
    Point c(m);
    for (std::size_t j = 0; j < worst; ++j) c += v[j];
    c *= 1.0 / m;

    const Point xr = c + (c - v[worst]);
    const double fr = objective(xr);
    if (fr < f[0]) {
      const Point xe = c + (c - v[worst]) * 2.0;
      const double fe = objective(xe);
      if (fe < fr) {
        v[worst] = xe;
        f[worst] = fe;
      } else {
        v[worst] = xr;
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[worst - 1]) {
      v[worst] = xr;
      f[worst] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < f[worst]) {
      const Point xc = c + (xr - c) * 0.5;
      const double fc = objective(xc);
      if (fc <= fr) {
        v[worst] = xc;
        f[worst] = fc;
        accepted = true;
      }
    } else {
      const Point xc = c + (v[worst] - c) * 0.5;
      const double fc = objective(xc);
      if (fc < f[worst]) {
        v[worst] = xc;
        f[worst] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (std::size_t j = 1; j < v.size(); ++j) {
        v[j] = v[0] + (v[j] - v[0]) * 0.5;
        f[j] = objective(v[j]);
      }
    }
  }
  if (!rep.converged) order();
  rep.iterations = iter;
  rep.center = v[0];

  const auto final_def = deficiency(D, rep.center, rep.r, w, opt);
  rep.evaluations = evals + 1;
  rep.delta_min = final_def.value;
  rep.error = final_def.error();
  rep.final_method = method_name(final_def.phi.method);
  rep.is_ball = rep.delta_min <= std::max(tol, 3.0 * rep.error);
  return rep;
}

std::vector<SweepRow> perturbation_sweep(double r0, const std::vector<double>& amplitudes,
                                         int mode, const Weight& w,
                                         const CharacterizeOptions& opt) {
  if (!(r0 > 0.0)) throw InvalidInput("sweep needs r0 > 0");
  if (mode < 1) throw InvalidInput("sweep mode must be >= 1");
  if (w.dim() != 2) throw InvalidInput("perturbation sweep works in dimension 2");
  std::vector<SweepRow> rows;
  for (double a : amplitudes) {
    if (!(std::abs(a) < r0)) throw InvalidInput("sweep amplitude must satisfy |a| < r0");
    std::vector<double> cos_coeffs(static_cast<std::size_t>(mode), 0.0);
    cos_coeffs.back() = a;
    const auto D = StarDomain::fourier2d(Point(2), r0, cos_coeffs, {});
    const double r = matched_radius(D, opt.rules);
    const auto def = deficiency(D, D.anchor(), r, w, opt);
    SweepRow row;
    row.amplitude = a;
    row.r = r;
    row.deficiency = def.value;
    row.error = def.error();
    row.expected_sign = a == 0.0 ? std::abs(def.value) <= 1e-10 : def.value > 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wmean
