// Copyright 2026 The tridrop Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

#include "tridrop/bubble_geometry.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/constants.hpp"
#include "tridrop/error.hpp"

namespace tridrop {

enum class QuadratureMethod { analytic, monte_carlo, voxel };

inline std::string_view to_string(QuadratureMethod m) {
  switch (m) {
    case QuadratureMethod::analytic: return "analytic";
    case QuadratureMethod::monte_carlo: return "monte_carlo";
    case QuadratureMethod::voxel: return "voxel";
  }
  return "unknown";
}

/// How to evaluate Coulomb integrals that have no closed form.
struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::monte_carlo;
  std::uint64_t samples = 1'000'000;
  double grid_h = 0.05;
  std::uint64_t seed = 42;

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

inline constexpr std::uint64_t kMinMonteCarloSamples = 10'000;
inline constexpr int kMonteCarloBatches = 16;

inline void validate_spec(const QuadratureSpec& s) {
  if (s.method == QuadratureMethod::monte_carlo && s.samples < kMinMonteCarloSamples)
    throw Error(ErrorCode::InvalidSpec, "samples",
                "monte_carlo needs at least 10^4 samples");
  if (s.method == QuadratureMethod::voxel && !(s.grid_h > 0.0))
    throw Error(ErrorCode::InvalidSpec, "grid_h", "voxel size must be positive");
}

struct CoulombValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// Integral of |x-y|^{-1} over B_m x B_m: kappa * m^{5/3}.
inline CoulombValue ball_self_energy(double m) {
  if (!(m >= 0.0)) throw Error(ErrorCode::NegativeMass, "m", "mass must be >= 0");
  return {kBallSelfEnergyCoeff * pow_five_thirds(m), 0.0};
}

/// Interaction of two disjoint uniform balls: m1 m2 / d by the shell theorem.
inline CoulombValue ball_pair_interaction(double m1, double m2, double d) {
  if (!(m1 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m1", "mass must be >= 0");
  if (!(m2 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m2", "mass must be >= 0");
  if (!(d >= tangency_distance(m1, m2) * (1.0 - 1e-12)) || !(d > 0.0))
    throw Error(ErrorCode::OverlappingBalls, "d", "balls overlap");
  return {m1 * m2 / d, 0.0};
}

/// Exact self-interaction of a cube of side h.
inline double cube_self_correction(double h) {
  return kCubeSelfEnergyCoeff * h * h * h * h * h;
}

using Point3 = std::array<double, 3>;

namespace detail {

/// Uniform point in the ball of radius r centred at (0, 0, cz).
template <class Rng>
Point3 uniform_in_ball(Rng& rng, double cz, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const double x = u(rng), y = u(rng), z = u(rng);
    if (x * x + y * y + z * z <= 1.0) return {r * x, r * y, cz + r * z};
  }
}

inline double distance(const Point3& p, const Point3& q) {
  const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct BatchMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;
};

}  // namespace detail

/// Monte-Carlo estimate of vol_a * vol_b * E[1/|X-Y|] with X ~ sample_a,
/// Y ~ sample_b independent.  Samplers have the signature Point3(Rng&).
///
/// The samples are split into 16 batches with their own RNG streams derived
/// from (seed, stream, batch).  The reported value is the median of the
/// batch means; the standard error comes from the pooled sample variance.
/// The kernel is square-integrable in 3D, so the variance is finite, but the
/// per-sample distribution is heavy-tailed near x = y.  Batches may run on
/// separate threads; the result does not depend on the thread count.
template <class SamplerA, class SamplerB>
CoulombValue pair_integral_mc(const SamplerA& sample_a, double vol_a,
                              const SamplerB& sample_b, double vol_b,
                              std::uint64_t samples, std::uint64_t seed,
                              std::uint64_t stream) {
  std::array<detail::BatchMoments, kMonteCarloBatches> batches{};
  auto run_batch = [&](int b) {
    const std::uint64_t n = samples / kMonteCarloBatches +
                            (static_cast<std::uint64_t>(b) < samples % kMonteCarloBatches);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(seq);
    detail::BatchMoments m;
    for (std::uint64_t s = 0; s < n; ++s) {
      const Point3 x = sample_a(rng);
      const Point3 y = sample_b(rng);
      const double f = 1.0 / detail::distance(x, y);
      m.sum += f;
      m.sum_sq += f * f;
    }
    m.n = n;
    batches[b] = m;
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, kMonteCarloBatches);
  if (workers <= 1 || samples < 200'000) {
    for (int b = 0; b < kMonteCarloBatches; ++b) run_batch(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int b = static_cast<int>(w); b < kMonteCarloBatches; b += workers) run_batch(b);
      });
    for (auto& t : pool) t.join();
  }

  std::array<double, kMonteCarloBatches> means{};
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t n = 0;
  for (int b = 0; b < kMonteCarloBatches; ++b) {
    means[b] = batches[b].n ? batches[b].sum / static_cast<double>(batches[b].n) : 0.0;
    sum += batches[b].sum;
    sum_sq += batches[b].sum_sq;
    n += batches[b].n;
  }
  std::sort(means.begin(), means.end());
  const double median = 0.5 * (means[kMonteCarloBatches / 2 - 1] + means[kMonteCarloBatches / 2]);
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  const double scale = vol_a * vol_b;
  return {scale * median, scale * std::sqrt(var / static_cast<double>(n))};
}

/// Monte-Carlo counterpart of ball_self_energy.
inline CoulombValue ball_self_energy_mc(double m, const QuadratureSpec& spec) {
  validate_spec(spec);
  if (m == 0.0) return {};
  const double r = ball_radius(m);
  auto s = [r](std::mt19937_64& g) { return detail::uniform_in_ball(g, 0.0, r); };
  return pair_integral_mc(s, m, s, m, spec.samples, spec.seed, 100);
}

/// Monte-Carlo counterpart of ball_pair_interaction.
inline CoulombValue ball_pair_interaction_mc(double m1, double m2, double d,
                                             const QuadratureSpec& spec) {
  validate_spec(spec);
  ball_pair_interaction(m1, m2, d);  // precondition check
  const double r1 = ball_radius(m1), r2 = ball_radius(m2);
  auto s1 = [r1](std::mt19937_64& g) { return detail::uniform_in_ball(g, 0.0, r1); };
  auto s2 = [r2, d](std::mt19937_64& g) { return detail::uniform_in_ball(g, d, r2); };
  return pair_integral_mc(s1, m1, s2, m2, spec.samples, spec.seed, 101);
}

inline constexpr double kVoxelBiasPerCell = 0.5;

/// Midpoint voxel double sum of the |x-y|^{-1} interaction between two
/// regions given by membership predicates and bounding balls on the z-axis.
/// Diagonal cell pairs use the exact cube self-interaction.
///
/// Bias is O(h): boundary cells are either fully in or out.  On balls of
/// radius R, self and pair terms stay within 0.5 h / R relative error for
/// h <= R / 4 (measured in the test suite; kVoxelBiasPerCell).
template <class InA, class InB>
double voxel_pair_integral(const InA& in_a, std::pair<double, double> ball_a,
                           const InB& in_b, std::pair<double, double> ball_b,
                           double h, bool same_region) {
  auto cells = [h](const auto& inside, std::pair<double, double> ball) {
    const auto [cz, r] = ball;
    std::vector<Point3> pts;
    const long lo_xy = static_cast<long>(std::floor(-r / h)) - 1;
    const long hi_xy = static_cast<long>(std::ceil(r / h)) + 1;
    const long lo_z = static_cast<long>(std::floor((cz - r) / h)) - 1;
    const long hi_z = static_cast<long>(std::ceil((cz + r) / h)) + 1;
    for (long i = lo_xy; i <= hi_xy; ++i)
      for (long j = lo_xy; j <= hi_xy; ++j)
        for (long k = lo_z; k <= hi_z; ++k) {
          const double x = (i + 0.5) * h, y = (j + 0.5) * h, z = (k + 0.5) * h;
          if (inside(x, y, z)) pts.push_back({x, y, z});
        }
    return pts;
  };
  const auto a = cells(in_a, ball_a);
  const auto b = same_region ? a : cells(in_b, ball_b);
  if (a.empty() || b.empty())
    throw Error(ErrorCode::InvalidSpec, "grid_h", "voxel grid misses a region entirely");
  if (static_cast<double>(a.size()) * static_cast<double>(b.size()) > 4e9)
    throw Error(ErrorCode::InvalidSpec, "grid_h", "voxel grid too fine");

  const double h6 = h * h * h * h * h * h;
  double total = 0.0;
  if (same_region) {
    for (std::size_t p = 0; p < a.size(); ++p) {
      double row = 0.0;
      for (std::size_t q = p + 1; q < a.size(); ++q) row += 1.0 / detail::distance(a[p], a[q]);
      total += 2.0 * row;
    }
    return h6 * total + static_cast<double>(a.size()) * cube_self_correction(h);
  }
  for (const auto& p : a) {
    double row = 0.0;
    for (const auto& q : b) row += 1.0 / detail::distance(p, q);
    total += row;
  }
  return h6 * total;
}

/// Integral of |x-y|^{-1} over lobe_i x lobe_j of a double bubble, by Monte
/// Carlo (rejection sampling from each lobe's bounding ball) or voxel sum.
/// Throws ConvergenceFailure when the relative standard error exceeds 1%.
inline CoulombValue bubble_coulomb(const DoubleBubbleGeometry& g, int phase_i,
                                   int phase_j, const QuadratureSpec& spec) {
  validate_spec(spec);
  if ((phase_i != 1 && phase_i != 2) || (phase_j != 1 && phase_j != 2))
    throw Error(ErrorCode::InvalidSpec, "phases", "phases must be 1 or 2");
  if (spec.method == QuadratureMethod::analytic)
    throw Error(ErrorCode::InvalidSpec, "method",
                "double bubble interactions have no closed form");
  if (g.volume(phase_i) == 0.0 || g.volume(phase_j) == 0.0) return {};
  // The integral is symmetric; a canonical order makes (j, i) reproduce (i, j).
  if (phase_i > phase_j) std::swap(phase_i, phase_j);

  if (spec.method == QuadratureMethod::voxel) {
    auto in_i = [&](double x, double y, double z) { return g.contains(phase_i, x, y, z); };
    auto in_j = [&](double x, double y, double z) { return g.contains(phase_j, x, y, z); };
    return {voxel_pair_integral(in_i, g.bounding_ball(phase_i), in_j,
                                g.bounding_ball(phase_j), spec.grid_h, phase_i == phase_j),
            0.0};
  }

  auto sampler = [&g](int phase) {
    const auto [cz, r] = g.bounding_ball(phase);
    return [&g, phase, cz, r](std::mt19937_64& rng) {
      for (;;) {
        const Point3 p = detail::uniform_in_ball(rng, cz, r);
        if (g.contains(phase, p[0], p[1], p[2])) return p;
      }
    };
  };
  const std::uint64_t stream = 10u * std::min(phase_i, phase_j) + std::max(phase_i, phase_j);
  const CoulombValue v = pair_integral_mc(sampler(phase_i), g.volume(phase_i), sampler(phase_j),
                                          g.volume(phase_j), spec.samples, spec.seed, stream);
  if (!(v.value > 0.0) || v.std_error > 0.01 * v.value)
    throw Error(ErrorCode::ConvergenceFailure, "samples",
                "Monte-Carlo relative standard error above 1%");
  return v;
}

}  // namespace tridrop
