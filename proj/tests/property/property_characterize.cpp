#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "wmean/characterize.hpp"

using namespace wmean;
using wmean::testing::Gen;

namespace {
StarDomain random_planar(Gen& g, const Point& anchor, double max_amp) {
  std::vector<double> c;
  std::vector<double> s;
  const int modes = g.integer(2, 5);
  for (int j = 0; j < modes; ++j) {
    c.push_back(g.uniform(-max_amp, max_amp));
    s.push_back(g.uniform(-max_amp, max_amp));
  }
  c[0] = 0.0;  // a pure translation mode would only move the anchor
  s[0] = 0.0;
  return StarDomain::fourier2d(anchor, 1.0, c, s);
}
}  // namespace

TEST_CASE("deficiency is positive for perturbed discs") {
  Gen g(601);
  for (int k = 0; k < 20; ++k) {
    const auto D = random_planar(g, g.point(2, -1, 1), 0.08);
    const double r = matched_radius(D);
    for (const auto& w : {Weight::log(2), Weight::riesz(2, 1.0), Weight::power(2, 2.0)}) {
      const auto d = deficiency(D, D.anchor(), r, w);
      CHECK(d.volume_condition_ok);
      CHECK_MESSAGE(d.value > 10 * d.error(), w.spec() << " delta=" << d.value);
    }
  }
}

TEST_CASE("deficiency is positive for perturbed spheres") {
  Gen g(602);
  for (int k = 0; k < 5; ++k) {
    const auto D = StarDomain::separable3d(
        Point{0.0, 0.0, 0.0}, 1.0,
        {{g.uniform(-0.1, 0.1), 2, 0, false}, {g.uniform(-0.1, 0.1), 1, 2, g.coin()}});
    const auto d = deficiency(D, D.anchor(), matched_radius(D), Weight::log(3));
    CHECK(d.value > 10 * d.error());
  }
}

TEST_CASE("deficiency of a disc grows with the offset of x") {
  Gen g(603);
  const auto disc = StarDomain::ball(Ball(Point{0.0, 0.0}, 1.0));
  for (int k = 0; k < 20; ++k) {
    const Point h = g.point_in_ball(Ball(Point{0.0, 0.0}, 0.8));
    const auto d = deficiency(disc, h, 1.0, Weight::log(2));
    CHECK(std::abs(d.value - 0.5 * h.norm_squared()) <= 1e-12);
  }
}

TEST_CASE("star and Monte Carlo paths agree") {
  Gen g(604);
  for (int k = 0; k < 10; ++k) {
    const auto D = random_planar(g, Point{0.0, 0.0}, 0.06);
    const Point x = g.point_in_ball(Ball(Point{0.0, 0.0}, 0.3));
    const double r = matched_radius(D);
    const auto w = k % 2 == 0 ? Weight::log(2) : Weight::riesz(2, 1.5);
    const auto star = deficiency(D, x, r, w);
    CharacterizeOptions opt;
    opt.mc_n = 200000;
    opt.seed = static_cast<std::uint64_t>(k);
    const auto mc = deficiency(ImplicitDomain::from_star(D), x, r, w, opt);
    CHECK(star.phi.method == Estimate::Method::ProductRule);
    CHECK(mc.phi.method == Estimate::Method::MonteCarlo);
    CHECK_MESSAGE(std::abs(star.value - mc.value) <= 4 * mc.error() + star.error(),
                  "star=" << star.value << " mc=" << mc.value << " err=" << mc.error());
  }
}

TEST_CASE("deficiency is invariant under rigid motions") {
  Gen g(605);
  for (int k = 0; k < 10; ++k) {
    const auto D = random_planar(g, Point{0.0, 0.0}, 0.08);
    const double r = matched_radius(D);
    const double angle = g.uniform(0, 2 * std::numbers::pi);
    const Point shift = g.point(2, -5, 5);
    const auto moved = D.rotated(angle).translated(shift);
    const double a = deficiency(D, D.anchor(), r, Weight::log(2)).value;
    const double b = deficiency(moved, moved.anchor(), r, Weight::log(2)).value;
    CHECK(std::abs(a - b) <= 1e-13);
  }
}

TEST_CASE("log deficiency is invariant under dilation") {
  Gen g(606);
  for (int k = 0; k < 10; ++k) {
    const auto D = random_planar(g, Point{0.0, 0.0}, 0.08);
    const double lambda = g.uniform(0.2, 5.0);
    std::vector<double> c;
    std::vector<double> s;
    for (int j = 1; j <= 8; ++j) {
      // Recover the Fourier coefficients from the boundary by sampling.
      double cj = 0.0;
      double sj = 0.0;
      for (int i = 0; i < 64; ++i) {
        const double t = 2 * std::numbers::pi * i / 64;
        const double rho = D.radius_at(Point{std::cos(t), std::sin(t)});
        cj += rho * std::cos(j * t) / 32;
        sj += rho * std::sin(j * t) / 32;
      }
      c.push_back(lambda * cj);
      s.push_back(lambda * sj);
    }
    const auto big = StarDomain::fourier2d(Point{0.0, 0.0}, lambda, c, s);
    const double a = deficiency(D, D.anchor(), matched_radius(D), Weight::log(2)).value;
    const double b = deficiency(big, big.anchor(), matched_radius(big), Weight::log(2)).value;
    CHECK(std::abs(a - b) <= 1e-12);
  }
}

TEST_CASE("star functional converges monotonically in the sphere resolution") {
  const auto D = StarDomain::fourier2d(Point{0.0, 0.0}, 1.0, {0.0, 0.15, 0.05}, {0.0, 0.0, 0.1});
  CharacterizeOptions ref;
  ref.rules.sphere_n = 1024;
  const double truth = functional(D, D.anchor(), 1.0, Weight::log(2), ref).value;
  double prev = 1e300;
  for (int n : {4, 8, 12, 16}) {
    CharacterizeOptions opt;
    opt.rules.sphere_n = n;
    const double err = std::abs(functional(D, D.anchor(), 1.0, Weight::log(2), opt).value - truth);
    CHECK(err < prev);
    prev = err;
  }
}
