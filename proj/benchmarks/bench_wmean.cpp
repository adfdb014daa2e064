#include <benchmark/benchmark.h>

#include "wmean/characterize.hpp"
#include "wmean/expr.hpp"
#include "wmean/harmonic.hpp"
#include "wmean/meanvalue.hpp"
#include "wmean/weights.hpp"

using namespace wmean;

namespace {

void BM_WeightedMeanPlane(benchmark::State& state) {
  MeanOptions opt;
  opt.rules.sphere_n = static_cast<int>(state.range(0));
  const auto u = HarmonicFn::polynomial(2, "x4-6x2y2+y4");
  const Ball b(Point{0.2, 0.1}, 0.9);
  const auto w = Weight::riesz(2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_mean(u.field(), b, w, opt));
}
BENCHMARK(BM_WeightedMeanPlane)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_AllMeansSpace(benchmark::State& state) {
  MeanOptions opt;
  opt.rules.sphere_n = static_cast<int>(state.range(0));
  opt.rules.radial_panels = 30;
  opt.rules.grading_ratio = 0.1;
  const auto u = HarmonicFn::polynomial(3, "z(x3-3xy2)");
  const Ball b(Point{0.2, 0.1, -0.3}, 0.9);
  const std::vector<Weight> ws = {Weight::log(3), Weight::riesz(3, 1.0), Weight::power(3, 2.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_means_and_gradient(u.field(), b, ws, opt));
  }
}
BENCHMARK(BM_AllMeansSpace)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MonteCarloMean(benchmark::State& state) {
  MeanOptions opt;
  opt.mc_n = static_cast<std::size_t>(state.range(0));
  const auto u = HarmonicFn::product(4, 0, 1);
  const Ball b(Point{0.0, 0.0, 0.0, 0.0}, 1.0);
  const auto w = Weight::log(4);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_mean(u.field(), b, w, opt));
}
BENCHMARK(BM_MonteCarloMean)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_StarDeficiency(benchmark::State& state) {
  const auto D = StarDomain::expression(
      Point{0.0, 0.0}, Expr::parse("1/sqrt((cos(theta)/1.2)^2 + (1.2*sin(theta))^2)", {"theta"}));
  const Point x{0.1, 0.05};
  const auto w = Weight::log(2);
  for (auto _ : state) benchmark::DoNotOptimize(deficiency(D, x, 1.0, w));
}
BENCHMARK(BM_StarDeficiency)->Unit(benchmark::kMillisecond);

void BM_ExprEval(benchmark::State& state) {
  const auto e = Expr::parse("sin(pi*(r-t)/r) + log(r/t)", {"t", "r"});
  const double vals[] = {0.3, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(std::span<const double>(vals, 2)));
}
BENCHMARK(BM_ExprEval);

}  // namespace

BENCHMARK_MAIN();
