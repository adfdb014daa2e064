#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "wmean/meanvalue.hpp"
#include "wmean/parallel.hpp"

using namespace wmean;
using wmean::testing::Gen;

namespace {
MeanOptions reduced() {
  MeanOptions opt;
  opt.rules.sphere_n = 128;
  opt.rules.radial_panels = 30;
  opt.rules.grading_ratio = 0.1;
  return opt;
}
}  // namespace

TEST_CASE("weighted means of random harmonics equal c_w u(x) on random planar balls") {
  Gen g(501);
  for (int k = 0; k < 20; ++k) {
    const Ball b = g.ball(2);
    const auto u = random_harmonic(static_cast<std::uint64_t>(k), 2, 4);
    const std::vector<Weight> ws = {Weight::log(2), Weight::riesz(2, g.uniform(0.5, 1.9)),
                                    Weight::power(2, g.uniform(0.5, 3.0))};
    const auto est = weighted_means_and_gradient(u.field(), b, ws);
    const double ux = u.value(b.center());
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const double claimed = ws[i].mean_constant(b.radius()) * ux;
      CHECK_MESSAGE(std::abs(est[i].value - claimed) <= 1e-9 * (1.0 + std::abs(claimed)),
                    ws[i].spec() << " r=" << b.radius());
    }
    const Point grad = u.gradient(b.center());
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(est[3 + a].value - grad[a]) <= 1e-9 * (1.0 + std::abs(grad[a])));
    }
    CHECK(std::abs(spherical_mean(u.field(), b).value - ux) <= 1e-11 * (1.0 + std::abs(ux)));
    CHECK(std::abs(volume_mean(u.field(), b).value - ux) <= 1e-11 * (1.0 + std::abs(ux)));
  }
}

TEST_CASE("weighted means of random harmonics in space") {
  Gen g(502);
  const auto opt = reduced();
  for (int k = 0; k < 8; ++k) {
    const Ball b = g.ball(3);
    const auto u = random_harmonic(static_cast<std::uint64_t>(50 + k), 3, 4);
    const std::vector<Weight> ws = {Weight::log(3), Weight::riesz(3, 1.0), Weight::power(3, 2.0)};
    const auto est = weighted_means_and_gradient(u.field(), b, ws, opt);
    const double ux = u.value(b.center());
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const double claimed = ws[i].mean_constant(b.radius()) * ux;
      CHECK_MESSAGE(std::abs(est[i].value - claimed) <= 1e-9 * (1.0 + std::abs(claimed)),
                    ws[i].spec());
    }
    const Point grad = u.gradient(b.center());
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(est[3 + a].value - grad[a]) <= 1e-9 * (1.0 + std::abs(grad[a])));
    }
  }
}

TEST_CASE("translating the ball and the function together leaves means unchanged") {
  Gen g(503);
  for (int k = 0; k < 10; ++k) {
    const Ball b = g.ball(2);
    const Point shift = g.point(2, -3, 3);
    const ScalarField f = [](const Point& y) { return std::exp(y[0]) * std::cos(y[1]); };
    const ScalarField shifted = [&](const Point& y) { return f(y - shift); };
    const Ball moved(b.center() + shift, b.radius());
    const auto w = Weight::riesz(2, 0.7);
    const double a = weighted_mean(f, b, w).value;
    const double c = weighted_mean(shifted, moved, w).value;
    CHECK(std::abs(a - c) <= 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("Monte Carlo error bars cover the truth at the nominal rate") {
  // u = x1 x2 + x3 in R^4 is harmonic, so the Log-weighted mean is u(x) / 4.
  const auto u = HarmonicFn::combination(
      {{1.0, HarmonicFn::product(4, 0, 1)}, {1.0, HarmonicFn::coordinate(4, 2)}});
  const Ball b(Point{0.3, -0.2, 0.4, 0.1}, 0.8);
  const double truth = u.value(b.center()) / 4.0;
  int within2 = 0;
  int within3 = 0;
  constexpr int kRuns = 60;
  for (int s = 0; s < kRuns; ++s) {
    MeanOptions opt;
    opt.mc_n = 20000;
    opt.seed = static_cast<std::uint64_t>(s);
    const auto e = weighted_mean(u.field(), b, Weight::log(4), opt);
    const double z = std::abs(e.value - truth) / e.error;
    within2 += z <= 2.0 ? 1 : 0;
    within3 += z <= 3.0 ? 1 : 0;
  }
  // Nominal rates 95.4% and 99.7%.
  CHECK(within2 >= 50);
  CHECK(within3 >= 57);
}

TEST_CASE("results are identical across thread counts") {
  Gen g(504);
  const auto opt = reduced();
  const Ball b = g.ball(3);
  const auto u = random_harmonic(7, 3, 3);
  set_thread_count(1);
  const auto a = weighted_means_and_gradient(u.field(), b, {Weight::log(3)}, opt);
  set_thread_count(3);
  const auto c = weighted_means_and_gradient(u.field(), b, {Weight::log(3)}, opt);
  set_thread_count(1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == c[i].value);
    CHECK(a[i].error == c[i].error);
  }
}

TEST_CASE("derivative bounds hold for random harmonics") {
  Gen g(505);
  for (int k = 0; k < 10; ++k) {
    const int m = g.integer(2, 3);
    const auto u = random_harmonic(static_cast<std::uint64_t>(200 + k), m, 4);
    const Ball D(g.point(m, -1, 1), g.uniform(0.5, 1.5));
    const Ball Dp(D.center(), D.radius() * g.uniform(0.2, 0.8));
    const auto rep = derivative_bound_check(u, D, Dp, D.center(), 2000, 3);
    CHECK(rep.all_hold());
  }
}
