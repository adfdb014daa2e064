#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "wmean/geometry.hpp"
#include "wmean/quadrature.hpp"

namespace wmean {

/// Samples per RNG stream. The sample index range is pre-split into chunks of
/// this size; chunk c draws from its own stream seeded from (seed, c), so
/// results never depend on how chunks are scheduled.
inline constexpr std::size_t kMcChunk = 1u << 14;

/// Seed of the stream used by chunk `chunk` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t chunk) noexcept;

class McRng {
 public:
  explicit McRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  /// Standard normal (Box-Muller, one value per call).
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
};

/// Uniformly distributed direction on S^{m-1}.
Point sample_unit_sphere(int m, McRng& rng);
/// One direction drawn from a fresh stream seeded with `seed`.
Point mc_sphere_sample(int m, std::uint64_t seed);

/// Visitor for box sampling: fills one value per channel for sample y.
using BoxVisitor = std::function<void(const Point&, std::span<double>)>;

/// Plain Monte Carlo over a box: for each channel, value = |box| * mean(f_k)
/// and error = |box| * stddev(f_k) / sqrt(n).
std::vector<Estimate> mc_integrate_box_channels(const BoundingBox& box, std::size_t n,
                                                std::uint64_t seed, std::size_t channels,
                                                const BoxVisitor& visitor);

/// ∫_D g dy by uniform sampling in D's bounding box. Throws Error("domain not
/// detected in bbox") when no sample hits D. Requires n >= 1000.
Estimate mc_integrate_indicator(const ImplicitDomain& domain, const ScalarField& g,
                                std::size_t n, std::uint64_t seed);

/// Visitor for ball sampling: y, distance to the center, channel values.
using BallVisitor = std::function<void(const Point&, double, std::span<double>)>;

/// Monte Carlo average over a ball: value = mean(f_k) over uniform samples in
/// the ball, i.e. (1/|B|) ∫_B f_k, with its standard error. Any dimension.
std::vector<Estimate> mc_ball_mean_channels(const Ball& ball, std::size_t n, std::uint64_t seed,
                                            std::size_t channels, const BallVisitor& visitor);

/// Monte Carlo average over the sphere S_r(x): mean of f(x + r θ).
Estimate mc_sphere_mean(const ScalarField& f, const Ball& ball, std::size_t n,
                        std::uint64_t seed);

}  // namespace wmean
