#include "wmean/montecarlo.hpp"

#include <cmath>
#include <numbers>

#include "wmean/error.hpp"
#include "wmean/parallel.hpp"
#include "wmean/summation.hpp"

namespace wmean {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct ChunkMoments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

// Runs `per_sample(rng, values)` for n samples split into fixed chunks and
// returns per-channel sums and sums of squares reduced in chunk order.
template <class PerSample>
ChunkMoments run_chunks(std::size_t n, std::uint64_t seed, std::size_t channels,
                        const PerSample& per_sample) {
  const std::size_t chunks = (n + kMcChunk - 1) / kMcChunk;
  std::vector<double> partial(chunks * 2 * channels, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    McRng rng(stream_seed(seed, c));
    const std::size_t begin = c * kMcChunk;
    const std::size_t end = std::min(n, begin + kMcChunk);
    std::vector<CompensatedSum> s(channels);
    std::vector<CompensatedSum> s2(channels);
    std::vector<double> vals(channels);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(vals.begin(), vals.end(), 0.0);
      per_sample(rng, std::span<double>(vals));
      for (std::size_t k = 0; k < channels; ++k) {
        s[k].add(vals[k]);
        s2[k].add(vals[k] * vals[k]);
      }
    }
    for (std::size_t k = 0; k < channels; ++k) {
      partial[c * 2 * channels + k] = s[k].value();
      partial[c * 2 * channels + channels + k] = s2[k].value();
    }
  });
  ChunkMoments out{std::vector<double>(channels), std::vector<double>(channels)};
  for (std::size_t k = 0; k < channels; ++k) {
    CompensatedSum s;
    CompensatedSum s2;
    for (std::size_t c = 0; c < chunks; ++c) {
      s.add(partial[c * 2 * channels + k]);
      s2.add(partial[c * 2 * channels + channels + k]);
    }
    out.sum[k] = s.value();
    out.sum_sq[k] = s2.value();
  }
  return out;
}

Estimate mean_estimate(double sum, double sum_sq, std::size_t n, double scale) {
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = n > 1 ? std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0)) : 0.0;
  Estimate e;
  e.value = scale * mean;
  e.error = scale * std::sqrt(var / dn);
  e.method = Estimate::Method::MonteCarlo;
  e.n_evals = n;
  return e;
}

void check_sample_count(std::size_t n) {
  if (n < 1000) throw InvalidInput("Monte Carlo needs at least 1000 samples");
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t chunk) noexcept {
  return splitmix64(splitmix64(seed) ^ (chunk * 0xD1B54A32D192ED03ull + 1));
}

double McRng::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point sample_unit_sphere(int m, McRng& rng) {
  Point p(m);
  double n2 = 0.0;
  do {
    for (int i = 0; i < m; ++i) p[i] = rng.normal();
    n2 = p.norm_squared();
  } while (n2 < 1e-300);
  p *= 1.0 / std::sqrt(n2);
  return p;
}

Point mc_sphere_sample(int m, std::uint64_t seed) {
  check_dimension(m);
  McRng rng(stream_seed(seed, 0));
  return sample_unit_sphere(m, rng);
}

std::vector<Estimate> mc_integrate_box_channels(const BoundingBox& box, std::size_t n,
                                                std::uint64_t seed, std::size_t channels,
                                                const BoxVisitor& visitor) {
  check_sample_count(n);
  const int m = box.dim();
  const auto moments = run_chunks(n, seed, channels, [&](McRng& rng, std::span<double> vals) {
    Point y(m);
    for (int i = 0; i < m; ++i) y[i] = box.lo()[i] + (box.hi()[i] - box.lo()[i]) * rng.uniform();
    visitor(y, vals);
  });
  std::vector<Estimate> out;
  out.reserve(channels);
  for (std::size_t k = 0; k < channels; ++k) {
    out.push_back(mean_estimate(moments.sum[k], moments.sum_sq[k], n, box.volume()));
  }
  return out;
}

Estimate mc_integrate_indicator(const ImplicitDomain& domain, const ScalarField& g,
                                std::size_t n, std::uint64_t seed) {
  // Channel 0: g * 1_D, channel 1: 1_D (hit counter).
  auto est = mc_integrate_box_channels(domain.bbox(), n, seed, 2,
                                       [&](const Point& y, std::span<double> out) {
                                         if (domain.contains(y)) {
                                           out[0] = g(y);
                                           out[1] = 1.0;
                                         }
                                       });
  if (est[1].value == 0.0) throw Error("domain not detected in bbox");
  return est[0];
}

std::vector<Estimate> mc_ball_mean_channels(const Ball& ball, std::size_t n, std::uint64_t seed,
                                            std::size_t channels, const BallVisitor& visitor) {
  check_sample_count(n);
  const int m = ball.dim();
  const double inv_m = 1.0 / m;
  const auto moments = run_chunks(n, seed, channels, [&](McRng& rng, std::span<double> vals) {
    const Point dir = sample_unit_sphere(m, rng);
    const double rho = ball.radius() * std::pow(rng.uniform(), inv_m);
    visitor(axpy(ball.center(), rho, dir), rho, vals);
  });
  std::vector<Estimate> out;
  out.reserve(channels);
  for (std::size_t k = 0; k < channels; ++k) {
    out.push_back(mean_estimate(moments.sum[k], moments.sum_sq[k], n, 1.0));
  }
  return out;
}

Estimate mc_sphere_mean(const ScalarField& f, const Ball& ball, std::size_t n,
                        std::uint64_t seed) {
  check_sample_count(n);
  const int m = ball.dim();
  const auto moments = run_chunks(n, seed, 1, [&](McRng& rng, std::span<double> vals) {
    vals[0] = f(axpy(ball.center(), ball.radius(), sample_unit_sphere(m, rng)));
  });
  return mean_estimate(moments.sum[0], moments.sum_sq[0], n, 1.0);
}

}  // namespace wmean
