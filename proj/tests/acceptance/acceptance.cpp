// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Deterministic rules use AcceptanceRules() below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "generators.hpp"
#include "wmean/characterize.hpp"
#include "wmean/expr.hpp"
#include "wmean/harmonic.hpp"
#include "wmean/meanvalue.hpp"
#include "wmean/parallel.hpp"
#include "wmean/quadrature.hpp"
#include "wmean/weights.hpp"

using namespace wmean;
using wmean::testing::Gen;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Reduced product rules: 128-point circle, 16 x 32 sphere, 30 panels of 16
// Gauss nodes graded by 0.1 (cutoff 1e-30 r).
RuleConfig acceptance_rules() {
  RuleConfig cfg;
  cfg.sphere_n = 128;
  cfg.radial_panels = 30;
  cfg.radial_nodes = 16;
  cfg.grading_ratio = 0.1;
  return cfg;
}

MeanOptions mean_options() {
  MeanOptions opt;
  opt.rules = acceptance_rules();
  return opt;
}

struct Case {
  HarmonicFn u;
  Ball ball;
};

// Catalogue functions plus a fundamental solution whose pole lies 2.5 r from
// the center, on 20 random balls per dimension.
std::vector<Case> harmonic_suite(int m, std::uint64_t seed) {
  Gen g(seed);
  std::vector<Case> out;
  for (int k = 0; k < 20; ++k) {
    const Ball b = g.ball(m);
    for (const auto& u : harmonic_catalogue(m)) out.push_back({u, b});
    const Point pole = axpy(b.center(), 2.5 * b.radius(), g.unit_vector(m));
    out.push_back({HarmonicFn::fundamental(pole), b});
  }
  return out;
}

std::vector<Case> full_suite() {
  auto a = harmonic_suite(2, 11);
  auto b = harmonic_suite(3, 12);
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Weight> riesz_power_weights(int m) {
  std::vector<Weight> ws;
  for (double a : {0.5, 1.0, m - 0.5}) ws.push_back(Weight::riesz(m, a));
  for (double b : {0.5, 1.0, 2.0, 5.0}) ws.push_back(Weight::power(m, b));
  return ws;
}

// One pass per case: Log, Riesz, power means and every gradient component.
struct SuitePass {
  std::vector<Case> cases;
  std::vector<std::vector<Estimate>> est;
  double seconds = 0.0;
};

const SuitePass& suite_pass() {
  static const SuitePass pass = [] {
    SuitePass p;
    const auto t0 = Clock::now();
    p.cases = full_suite();
    const auto opt = mean_options();
    for (const auto& c : p.cases) {
      const int m = c.u.dim();
      std::vector<Weight> ws = {Weight::log(m)};
      for (auto& w : riesz_power_weights(m)) ws.push_back(w);
      p.est.push_back(weighted_means_and_gradient(c.u.field(), c.ball, ws, opt));
    }
    p.seconds = seconds_since(t0);
    return p;
  }();
  return pass;
}

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s: %s (%s)\n", id, pass ? "PASS" : "FAIL", title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void criterion_gauss_means() {
  const auto t0 = Clock::now();
  const auto cases = full_suite();
  const auto opt = mean_options();
  double worst = 0.0;
  for (const auto& c : cases) {
    const double ux = c.u.value(c.ball.center());
    const double scale = 1.0 + std::abs(ux);
    worst = std::max(worst, std::abs(spherical_mean(c.u.field(), c.ball, opt).value - ux) / scale);
    worst = std::max(worst, std::abs(volume_mean(c.u.field(), c.ball, opt).value - ux) / scale);
  }
  const double secs = seconds_since(t0);
  report(1, "spherical and volume means", worst <= 1e-10 && secs < 10.0,
         fmt("max |mean-u(x)|/(1+|u(x)|) = %.3g", worst) + ", " + std::to_string(2 * cases.size()) +
             " checks, " + fmt("%.2f s", secs));
}

void criterion_log_identity() {
  const auto& p = suite_pass();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.cases.size(); ++i) {
    const auto& c = p.cases[i];
    const double ux = c.u.value(c.ball.center());
    worst = std::max(worst, std::abs(c.u.dim() * p.est[i][0].value - ux));
  }
  const auto rule = RuleConfig{}.radial_rule(1.0);
  const double moment = radial_integrate([](double t) { return t * std::log(t); }, rule).value;
  const double moment_err = std::abs(moment + 0.25);
  report(2, "log-weighted identity", worst <= 1e-8 && moment_err <= 1e-12,
         fmt("max |m*mean-u(x)| = %.3g", worst) + fmt(", |int rho log rho + 1/4| = %.3g", moment_err));
}

void criterion_riesz_power() {
  const auto& p = suite_pass();
  double worst = 0.0;
  for (std::size_t i = 0; i < p.cases.size(); ++i) {
    const auto& c = p.cases[i];
    const int m = c.u.dim();
    const double ux = c.u.value(c.ball.center());
    const auto ws = riesz_power_weights(m);
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const double claimed = ws[k].mean_constant(c.ball.radius()) * ux;
      worst = std::max(worst, std::abs(p.est[i][1 + k].value - claimed));
    }
  }
  report(3, "Riesz and power identities", worst <= 1e-7,
         fmt("max residual = %.3g", worst) + ", " + std::to_string(p.cases.size() * 7) + " checks");
}

void criterion_gradient() {
  const auto& p = suite_pass();
  double worst_exact = 0.0;
  double worst_fd = 0.0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < p.cases.size(); ++i) {
    const auto& c = p.cases[i];
    const int m = c.u.dim();
    const Point x = c.ball.center();
    const Point g = c.u.gradient(x);
    for (int a = 0; a < m; ++a) {
      const double est = p.est[i][8 + static_cast<std::size_t>(a)].value;
      const double fd =
          (c.u.value(x + Point::unit(m, a) * h) - c.u.value(x - Point::unit(m, a) * h)) / (2 * h);
      worst_exact = std::max(worst_exact, std::abs(est - g[a]));
      worst_fd = std::max(worst_fd, std::abs(est - fd));
    }
  }
  report(4, "gradient formula", worst_exact <= 1e-6 && worst_fd <= 1e-5,
         fmt("max vs exact = %.3g", worst_exact) + fmt(", max vs finite differences = %.3g", worst_fd));
}

void criterion_derivative_bounds() {
  Gen g(41);
  int violations = 0;
  int nonnegative_checked = 0;
  for (int k = 0; k < 50; ++k) {
    const int m = g.integer(2, 3);
    const Ball D(g.point(m, -1, 1), g.uniform(0.5, 1.5));
    HarmonicFn u = k % 3 == 0 ? HarmonicFn::fundamental(axpy(D.center(), 1.5 * D.radius(),
                                                             g.unit_vector(m)))
                              : random_harmonic(static_cast<std::uint64_t>(k), m, 4);
    if (k % 2 == 0) {
      // Shift by a constant above sup |u| on the closed ball so u > 0 in D.
      double sup = 0.0;
      for (int j = 0; j < 2000; ++j) {
        sup = std::max(sup, std::abs(u.value(axpy(D.center(), D.radius(), g.unit_vector(m)))));
      }
      u = HarmonicFn::combination({{1.0, u}, {1.0, HarmonicFn::constant(m, 1.5 * sup + 1.0)}});
    }
    const Point offset = g.point_in_ball(Ball(Point(m), 0.3 * D.radius()));
    const Ball Dp(D.center() + offset, g.uniform(0.1, 0.6) * D.radius());
    const Point x0 = g.point_in_ball(Ball(D.center(), 0.9 * D.radius()));
    const auto rep = derivative_bound_check(u, D, Dp, x0, 4000, static_cast<std::uint64_t>(k));
    if (!rep.all_hold()) ++violations;
    if (rep.nonnegative_checked) ++nonnegative_checked;
  }
  report(5, "interior derivative bounds", violations == 0,
         std::to_string(violations) + " violations in 50 configurations, " +
             std::to_string(nonnegative_checked) + " with the nonnegative bound");
}

void criterion_mean_constants() {
  double worst = 0.0;
  int checks = 0;
  for (int m : {2, 3, 5}) {
    const std::vector<double> alphas = {0.5, 1.0, 1.5, m - 0.5};
    const std::vector<double> betas = {0.5, 1.0, 2.0, 5.0};
    for (double r : {0.5, 1.0, 2.0}) {
      auto rel = [&](double got, double want) {
        worst = std::max(worst, std::abs(got - want) / std::abs(want));
        ++checks;
      };
      rel(Weight::log(m).mean_constant(r), 1.0 / m);
      for (double a : alphas) {
        rel(Weight::riesz(m, a).mean_constant(r), (m / a - 1.0) * std::pow(r, a - m));
      }
      for (double b : betas) {
        rel(Weight::power(m, b).mean_constant(r), (1.0 - m / (m + b)) * std::pow(r, b));
      }
    }
  }
  report(6, "mean constants", worst <= 1e-11,
         fmt("max relative error = %.3g", worst) + ", " + std::to_string(checks) + " checks");
}

void criterion_ball_equality() {
  Gen g(71);
  CharacterizeOptions opt;
  opt.rules = acceptance_rules();
  double worst_ball = 0.0;
  for (int k = 0; k < 10; ++k) {
    for (int m : {2, 3}) {
      const Ball b = g.ball(m);
      const auto D = StarDomain::ball(b);
      std::vector<Weight> ws = {Weight::log(m)};
      for (auto& w : riesz_power_weights(m)) ws.push_back(w);
      for (const auto& w : ws) {
        worst_ball = std::max(worst_ball, std::abs(deficiency(D, b.center(), b.radius(), w, opt).value));
      }
    }
  }
  int positive = 0;
  double min_margin = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double r0 = g.uniform(0.5, 2.0);
    const double amp = g.uniform(0.05, 0.15) * r0;
    StarDomain D = k % 4 == 3
                       ? StarDomain::separable3d(g.point(3, -1, 1), r0,
                                                 {{amp, 2, 0, false}, {0.3 * amp, 1, 2, true}})
                       : StarDomain::fourier2d(g.point(2, -1, 1), r0, {},
                                               std::vector<double>{0.0, amp, 0.2 * amp});
    const int m = D.dim();
    const double r = matched_radius(D, opt.rules);
    const Weight w = k % 3 == 0 ? Weight::log(m)
                     : k % 3 == 1 ? Weight::riesz(m, 1.0)
                                  : Weight::power(m, 2.0);
    const auto d = deficiency(D, D.anchor(), r, w, opt);
    const double margin = d.value / std::max(d.error(), 1e-300);
    min_margin = std::min(min_margin, margin);
    if (d.volume_condition_ok && d.value > 0.0 && margin >= 10.0) ++positive;
  }
  report(7, "ball equality and strict positivity", worst_ball <= 1e-9 && positive == 20,
         fmt("max |delta| on balls = %.3g", worst_ball) + ", " + std::to_string(positive) +
             "/20 perturbed domains positive" + fmt(", min delta/error = %.3g", min_margin));
}

void criterion_decomposition() {
  const auto ellipse = ImplicitDomain::ellipsoid(Point{0.0, 0.0}, {1.2, 1.0 / 1.2});
  const auto ellipsoid = ImplicitDomain::ellipsoid(Point{0.0, 0.0, 0.0}, {1.2, 1.0, 1.0 / 1.2});
  const Ball unit2(Point{0.0, 0.0}, 1.0);
  struct Config {
    const ImplicitDomain* D;
    Ball B;
    Weight w;
  };
  const std::vector<Config> matrix = {
      {&ellipse, unit2, Weight::log(2)},
      {&ellipse, unit2, Weight::riesz(2, 1.0)},
      {&ellipse, Ball(Point{0.1, 0.05}, 0.9), Weight::power(2, 2.0)},
      {&ellipsoid, Ball(Point{0.0, 0.0, 0.0}, 1.0), Weight::log(3)},
  };
  int ok = 0;
  int total = 0;
  int sign_failures = 0;
  for (const auto& c : matrix) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto rep = proof_decomposition(*c.D, c.B, c.w, 1'000'000, seed);
      ++total;
      if (rep.all_ok()) ++ok;
      if (!rep.inner_sign_ok || !rep.outer_sign_ok) ++sign_failures;
    }
  }
  const double coverage = static_cast<double>(ok) / total;
  report(8, "decomposition signs and consistency", coverage >= 0.94,
         std::to_string(ok) + "/" + std::to_string(total) + " runs within 3 standard errors" +
             fmt(" (%.1f%%)", 100 * coverage) + ", " + std::to_string(sign_failures) +
             " sign failures");
}

void criterion_recovery() {
  const auto t0 = Clock::now();
  Gen g(91);
  CharacterizeOptions opt;
  int good = 0;
  double worst_dist = 0.0;
  double worst_delta = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Point c = g.point(2, -2, 2);
    const auto D = StarDomain::ball(Ball(c, 1.0));
    const Point guess = g.point_in_ball(Ball(c, 0.9));
    const auto rep = recover_ball(D, Weight::log(2), guess, 1e-7, opt);
    const double dist = distance(rep.center, c);
    worst_dist = std::max(worst_dist, dist);
    worst_delta = std::max(worst_delta, rep.delta_min);
    if (dist <= 1e-5 && rep.delta_min <= 1e-7 && rep.is_ball) ++good;
  }
  const auto ellipse = StarDomain::expression(
      Point{0.0, 0.0}, Expr::parse("1/sqrt((cos(theta)/1.2)^2 + (1.2*sin(theta))^2)", {"theta"}));
  const auto ell = recover_ball(ellipse, Weight::log(2), Point{0.1, -0.1}, 1e-7, opt);
  const double secs = seconds_since(t0);
  report(9, "ball recovery", good == 10 && !ell.is_ball && secs < 60.0,
         std::to_string(good) + "/10 balls recovered" + fmt(", max center error = %.3g", worst_dist) +
             fmt(", max delta_min = %.3g", worst_delta) +
             (ell.is_ball ? ", ellipse misclassified" : ", ellipse rejected") +
             fmt(", %.2f s", secs));
}

void criterion_negative_controls() {
  const auto opt = mean_options();
  const auto u = TestFunction::squared_norm(3);
  const Ball b(Point{0.0, 0.0, 0.0}, 1.0);
  const auto s = verify_spherical(u, b, kDefaultTolerance, opt);
  const auto v = verify_volume(u, b, kDefaultTolerance, opt);
  const auto w = verify_identity(u, b, Weight::log(3), kDefaultTolerance, opt);
  const double min_residual = std::min({s.residual, v.residual, w.residual});
  const bool verifiers_fail = !s.pass && !v.pass && !w.pass && min_residual > 0.01;
  const auto sign = validate_weight(parse_weight("custom:t - r", 3), 1.0);
  const auto integ = validate_weight(parse_weight("custom:t^(-5)", 3), 1.0);
  const bool pass = verifiers_fail && !sign.sign_below && !integ.integrable;
  report(10, "negative controls", pass,
         fmt("min residual for |y|^2 = %.3g", min_residual) +
             (sign.sign_below ? ", t - r accepted" : ", t - r fails the sign condition") +
             (integ.integrable ? ", t^(-5) accepted" : ", t^(-5) fails integrability"));
}

std::string run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wmean");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str() + err.str();
}

void criterion_determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"verify", "--m", "3", "--fn", "random:seed=5,deg=4", "--center", "0.1,0.2,0.3", "--r", "0.8",
       "--kind", "all", "--weight", "riesz:alpha=0.5", "--sphere-n", "128", "--radial-panels",
       "30", "--grading-ratio", "0.1"},
      {"verify", "--m", "4", "--fn", "coord:2", "--kind", "all", "--mc-n", "100000", "--seed", "3"},
      {"bounds", "--m", "3", "--fn", "poly:xyz", "--samples", "5000", "--seed", "8"},
      {"sweep", "--amplitudes", "0,0.05,0.1", "--mode", "3", "--weight", "power:beta=2"},
  };
  int mismatches = 0;
  for (const auto& cmd : commands) {
    std::string reference;
    for (const char* threads : {"1", "2", "4", "1"}) {
      auto args = cmd;
      args.push_back("--threads");
      args.push_back(threads);
      const auto out = run_cli(args);
      if (reference.empty()) {
        reference = out;
      } else if (out != reference) {
        ++mismatches;
      }
    }
  }
  set_thread_count(1);
  report(11, "determinism across runs and thread counts", mismatches == 0,
         std::to_string(commands.size()) + " commands x 4 runs, " + std::to_string(mismatches) +
             " mismatches");
}

void criterion_mc_smoke() {
  MeanOptions opt;
  opt.mc_n = 1'000'000;
  opt.seed = 12;
  const Ball b(Point{0.2, -0.1, 0.3, 0.0}, 0.7);
  const std::vector<HarmonicFn> fns = {
      HarmonicFn::product(4, 0, 3), HarmonicFn::square_difference(4, 1, 2),
      HarmonicFn::coordinate(4, 0), HarmonicFn::fundamental(Point{2.0, 0.0, 0.0, 0.0})};
  int pass = 0;
  double worst_z = 0.0;
  for (const auto& u : fns) {
    const auto rep = verify_identity(TestFunction::from(u), b, Weight::log(4), 0.0, opt);
    worst_z = std::max(worst_z, rep.residual / std::max(rep.computed.error, 1e-300));
    if (rep.pass) ++pass;
  }
  report(12, "dimension 4 Monte Carlo identity", pass == static_cast<int>(fns.size()),
         std::to_string(pass) + "/" + std::to_string(fns.size()) +
             fmt(" within 3 standard errors, max z = %.3g", worst_z));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_gauss_means();
  criterion_log_identity();
  criterion_riesz_power();
  criterion_gradient();
  criterion_derivative_bounds();
  criterion_mean_constants();
  criterion_ball_equality();
  criterion_decomposition();
  criterion_recovery();
  criterion_negative_controls();
  criterion_determinism();
  criterion_mc_smoke();
  std::printf("%d of 12 criteria failed, %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
