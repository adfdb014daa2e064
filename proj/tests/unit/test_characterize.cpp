#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wmean/characterize.hpp"
#include "wmean/error.hpp"
#include "wmean/expr.hpp"

using namespace wmean;

namespace {
StarDomain ellipse_star() {
  return StarDomain::expression(
      Point{0.0, 0.0}, Expr::parse("1/sqrt((cos(theta)/1.2)^2 + (1.2*sin(theta))^2)", {"theta"}));
}
ImplicitDomain ellipse_implicit() {
  return ImplicitDomain::ellipsoid(Point{0.0, 0.0}, {1.2, 1.0 / 1.2});
}
}  // namespace

TEST_CASE("ellipse functional against frozen high-precision values") {
  const auto D = ellipse_star();
  const Point x{0.0, 0.0};
  const auto log_d = deficiency(D, x, 1.0, Weight::log(2));
  CHECK(std::abs(log_d.phi.value - 0.48347069804878943608) <= 1e-13);
  CHECK(std::abs(log_d.value - 0.016529301951210563921) <= 1e-13);
  CHECK(log_d.phi.error <= 1e-12);
  CHECK(log_d.volume_condition_ok);
  CHECK(log_d.ball_verdict(1e-7) == std::optional<bool>(false));

  const auto riesz = deficiency(D, x, 1.0, Weight::riesz(2, 1.0));
  CHECK(std::abs(riesz.phi.value - 0.98350494411723883922) <= 1e-12);
  CHECK(std::abs(riesz.value - 0.016495055882761160783) <= 1e-12);

  const auto power = deficiency(D, x, 1.0, Weight::power(2, 2.0));
  CHECK(std::abs(power.phi.value - 0.46638888888888888889) <= 1e-13);
  CHECK(std::abs(power.value - 0.033611111111111111111) <= 1e-13);
}

TEST_CASE("Monte Carlo functional agrees with the star path") {
  CharacterizeOptions opt;
  opt.mc_n = 400000;
  opt.seed = 2;
  const auto d = deficiency(ellipse_implicit(), Point{0.0, 0.0}, 1.0, Weight::log(2), opt);
  CHECK(d.phi.method == Estimate::Method::MonteCarlo);
  CHECK(std::abs(d.value - 0.016529301951210563921) <= 4 * d.error());
  CHECK(d.error() < 2e-3);
}

TEST_CASE("balls have zero deficiency at their center only") {
  const auto disc = StarDomain::ball(Ball(Point{0.5, 0.5}, 1.0));
  const auto centered = deficiency(disc, Point{0.5, 0.5}, 1.0, Weight::log(2));
  CHECK(std::abs(centered.value) <= 1e-14);
  CHECK(centered.ball_verdict(1e-7) == std::optional<bool>(true));
  // Off center: Φ = (1 - |h|^2)/2 for the unit disc, so δ = |h|^2 / 2.
  const auto off = deficiency(disc, Point{0.6, 0.55}, 1.0, Weight::log(2));
  CHECK(off.phi.method == Estimate::Method::ProductRule);
  CHECK(std::abs(off.value - 0.5 * (0.01 + 0.0025)) <= 1e-12);
}

TEST_CASE("perturbed discs and spheres against frozen values") {
  const auto star2 = StarDomain::fourier2d(Point{0.0, 0.0}, 1.0, {0.0, 0.1}, {});
  const double r2 = matched_radius(star2);
  CHECK(std::abs(r2 - 1.0024968827881710675) <= 1e-13);
  const auto d2 = deficiency(star2, Point{0.0, 0.0}, r2, Weight::log(2));
  CHECK(std::abs(d2.value - 0.0049658011602236690627) <= 1e-13);

  const auto star3 = StarDomain::separable3d(Point{0.0, 0.0, 0.0}, 1.0, {{0.1, 1, 0, false}});
  CHECK(std::abs(star_volume(star3) - 4.2306781068342548945) <= 1e-12);
  const double r3 = matched_radius(star3);
  CHECK(std::abs(r3 - 1.0033222835420891993) <= 1e-12);
  const auto d3 = deficiency(star3, Point{0.0, 0.0, 0.0}, r3, Weight::log(3));
  CHECK(std::abs(d3.value - 0.0049390009878200414752) <= 1e-12);
}

TEST_CASE("volume condition") {
  const auto disc = StarDomain::ball(Ball(Point{0.0, 0.0}, 1.0));
  const auto d = deficiency(disc, Point{0.0, 0.0}, 1.1, Weight::log(2));
  CHECK_FALSE(d.volume_condition_ok);
  CHECK_FALSE(d.ball_verdict(1e-7).has_value());
}

TEST_CASE("preconditions") {
  const auto disc = StarDomain::ball(Ball(Point{0.0, 0.0}, 1.0));
  CHECK_THROWS_AS(functional(disc, Point{2.0, 0.0}, 1.0, Weight::log(2)), InvalidInput);
  CHECK_THROWS_AS(functional(disc, Point{0.0, 0.0}, 0.0, Weight::log(2)), InvalidInput);
  CHECK_THROWS_AS(functional(disc, Point{0.0, 0.0}, 1.0, Weight::log(3)), InvalidInput);
  CHECK_THROWS_AS(functional(ellipse_implicit(), Point{0.0, 0.95}, 1.0, Weight::log(2)),
                  InvalidInput);
}

TEST_CASE("ray exits") {
  const auto disc = StarDomain::ball(Ball(Point{0.0, 0.0}, 1.0));
  const auto s = ray_exit(disc, Point{0.5, 0.0}, Point{1.0, 0.0});
  REQUIRE(s.has_value());
  CHECK(std::abs(*s - 0.5) <= 1e-14);
  const auto t = ray_exit(disc, Point{0.5, 0.0}, Point{0.0, 1.0});
  REQUIRE(t.has_value());
  CHECK(std::abs(*t - std::sqrt(0.75)) <= 1e-14);
  // A strongly non-convex flower seen from off its center: some ray leaves,
  // re-enters and leaves again.
  const auto flower = StarDomain::fourier2d(Point{0.0, 0.0}, 1.0, {0.0, 0.0, 0.0, 0.0, 0.6}, {});
  bool multiple = false;
  for (int k = 0; k < 64 && !multiple; ++k) {
    const double a = 2 * std::numbers::pi * k / 64;
    multiple = !ray_exit(flower, Point{0.35, 0.0}, Point{std::cos(a), std::sin(a)}).has_value();
  }
  CHECK(multiple);
}

TEST_CASE("non-star view falls back to Monte Carlo") {
  const auto flower = StarDomain::fourier2d(Point{0.0, 0.0}, 1.0, {0.0, 0.0, 0.0, 0.0, 0.6}, {});
  CharacterizeOptions opt;
  opt.mc_n = 100000;
  const auto e = functional(flower, Point{0.35, 0.0}, 0.5, Weight::log(2), opt);
  CHECK(e.method == Estimate::Method::MonteCarlo);
}

TEST_CASE("implicit matched radius") {
  const double r = matched_radius(ellipse_implicit(), 400000, 3);
  CHECK(std::abs(r - 1.0) < 5e-3);
}

TEST_CASE("decomposition of an ellipse against its matched ball") {
  const auto rep =
      proof_decomposition(ellipse_implicit(), Ball(Point{0.0, 0.0}, 1.0), Weight::log(2), 400000, 4);
  CHECK(rep.all_ok());
  CHECK_FALSE(rep.inner_empty);
  CHECK_FALSE(rep.outer_empty);
  CHECK(rep.weight_inner.value < 0.0);
  CHECK(rep.weight_outer.value > 0.0);
  // |G_i| = |G_e| because the volumes match.
  CHECK(std::abs(rep.vol_inner.value - rep.vol_outer.value) <=
        4 * std::hypot(rep.vol_inner.error, rep.vol_outer.error));
  CHECK(rep.c_w == 0.5);
}

TEST_CASE("decomposition of a ball against itself is trivial") {
  const Ball b(Point{0.0, 0.0}, 1.0);
  const auto rep = proof_decomposition(ImplicitDomain::ball(b), b, Weight::log(2), 100000, 4);
  CHECK(rep.inner_empty);
  CHECK(rep.outer_empty);
  CHECK(rep.all_ok());
}

TEST_CASE("ball recovery") {
  const auto disc = StarDomain::ball(Ball(Point{0.5, 0.5}, 1.0));
  const auto rep = recover_ball(disc, Weight::log(2), Point{0.45, 0.6});
  CHECK(rep.is_ball);
  CHECK(rep.converged);
  CHECK(distance(rep.center, Point{0.5, 0.5}) <= 1e-5);
  CHECK(std::abs(rep.r - 1.0) <= 1e-12);
  CHECK(rep.final_method == "product_rule");
  CHECK_FALSE(rep.trace.empty());
  CHECK(rep.evaluations > static_cast<std::size_t>(rep.iterations));

  const auto ell = recover_ball(ellipse_star(), Weight::log(2), Point{0.05, -0.05});
  CHECK_FALSE(ell.is_ball);
  CHECK(distance(ell.center, Point{0.0, 0.0}) <= 1e-4);
  CHECK(ell.delta_min > 0.01);
}

TEST_CASE("perturbation sweep signs") {
  const auto rows = perturbation_sweep(1.0, {0.0, 0.02, 0.1, -0.1}, 3, Weight::log(2));
  REQUIRE(rows.size() == 4);
  CHECK(std::abs(rows[0].deficiency) <= 1e-10);
  for (const auto& row : rows) CHECK(row.expected_sign);
  CHECK(rows[2].deficiency > rows[1].deficiency);
  CHECK_THROWS_AS(perturbation_sweep(1.0, {1.0}, 2, Weight::log(2)), InvalidInput);
  CHECK_THROWS_AS(perturbation_sweep(1.0, {0.1}, 0, Weight::log(2)), InvalidInput);
  CHECK_THROWS_AS(perturbation_sweep(1.0, {0.1}, 2, Weight::log(3)), InvalidInput);
}
