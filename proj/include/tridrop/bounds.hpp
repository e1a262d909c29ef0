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
#include <limits>
#include <optional>

#include "tridrop/constants.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/energy.hpp"

namespace tridrop {

using MassPair = std::array<double, 2>;

/// Energy released by merging pure balls of masses m1 and m2, divided by
/// (m1 + m2)^{2/3}.  Positive iff merging lowers the energy.
inline double normalized_merge_gain(double m1, double m2, double gamma) {
  const double s = m1 + m2;
  const double perimeter =
      kSphereAreaCoeff * (pow_two_thirds(m1) + pow_two_thirds(m2) - pow_two_thirds(s));
  const double coulomb =
      kBallSelfEnergyCoeff * (pow_five_thirds(m1) + pow_five_thirds(m2) - pow_five_thirds(s));
  return (perimeter + gamma * coulomb) / pow_two_thirds(s);
}

namespace detail {

/// Smallest normalized merge gain over (0, t]^2: a 64 x 64 log grid on
/// [1e-6 t, t]^2 followed by a compass search from the best node.
inline double worst_merge_gain(double t, double gamma) {
  constexpr int n = 64;
  constexpr double span = 6.0;  // decades below t
  const double top = std::log10(t);
  std::array<double, n> logs{}, nodes{};
  for (int i = 0; i < n; ++i) {
    logs[i] = top - span * (n - 1 - i) / (n - 1);
    nodes[i] = i == n - 1 ? t : std::pow(10.0, logs[i]);
  }
  double best = std::numeric_limits<double>::infinity();
  double bx = 0.0, by = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {  // symmetric in (m1, m2)
      const double v = normalized_merge_gain(nodes[i], nodes[j], gamma);
      if (v < best) best = v, bx = logs[i], by = logs[j];
    }
  double step = span / (n - 1);
  while (step > 1e-10) {
    bool moved = false;
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const double x = std::min(top, bx + dx * step), y = std::min(top, by + dy * step);
      const double v = normalized_merge_gain(std::pow(10.0, x), std::pow(10.0, y), gamma);
      if (v < best) best = v, bx = x, by = y, moved = true;
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace detail

/// Merging threshold m_S(gamma): the largest t such that merging any two
/// pure balls with masses <= t strictly lowers the energy.  Bisection on t
/// to 1e-6 relative, with a worst-pair search inside.  +inf for gamma == 0
/// (the perimeter is strictly subadditive).
inline double merge_threshold(double gamma_ii) {
  if (!(gamma_ii >= 0.0))
    throw Error(ErrorCode::NegativeGamma, "gamma_ii", "must be >= 0");
  if (gamma_ii == 0.0) return std::numeric_limits<double>::infinity();

  auto favorable = [&](double t) { return detail::worst_merge_gain(t, gamma_ii) > 0.0; };
  // Equal-mass closed form: an upper anchor for the threshold.
  const double equal_mass = kSphereAreaCoeff * (2.0 - std::cbrt(4.0)) /
                            ((std::pow(2.0, 5.0 / 3.0) - 2.0) * gamma_ii * kBallSelfEnergyCoeff);
  double hi = 1.01 * equal_mass;
  double lo = 0.5 * equal_mass;
  while (!favorable(lo)) hi = lo, lo *= 0.5;
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (favorable(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Lower bound on the largest phase-i mass carried by a single cluster:
/// min{ M_i / 2, (c M_i / (2 U))^3 } with U the two-ball energy.
inline MassPair largest_cluster_lower_bound(const BoundInputs& b) {
  const double u = two_ball_upper_bound(b);
  auto one = [&](double M) {
    const double x = kHalfSphereAreaCoeff * M / (2.0 * u);
    return std::min(0.5 * M, x * x * x);
  };
  return {one(b.M1), one(b.M2)};
}

inline MassPair largest_cluster_lower_bound(const ProblemParams& p) {
  return largest_cluster_lower_bound(BoundInputs::from(p));
}

/// Cost rates H_i = 3 U / m_i^+ of absorbing mass into the largest cluster.
inline MassPair H_constants(const BoundInputs& b, MassPair m_plus) {
  if (!(m_plus[0] > 0.0)) throw Error(ErrorCode::NonPositiveMass, "m_plus[0]", "must be > 0");
  if (!(m_plus[1] > 0.0)) throw Error(ErrorCode::NonPositiveMass, "m_plus[1]", "must be > 0");
  const double u = two_ball_upper_bound(b);
  return {3.0 * u / m_plus[0], 3.0 * u / m_plus[1]};
}

inline MassPair H_constants(const ProblemParams& p, MassPair m_plus) {
  return H_constants(BoundInputs::from(p), m_plus);
}

/// Root of eps H - c eps^{2/3}: below it the competitor strictly improves.
inline double improvement_floor(double H) {
  const double x = kHalfSphereAreaCoeff / H;
  return x * x * x;
}

/// Upper bound eps H - c eps^{2/3} on the energy change of a competitor move.
inline double energy_delta_bound(double eps, double H) {
  return eps * H - kHalfSphereAreaCoeff * pow_two_thirds(eps);
}

/// A-priori floor on the total mass of a mixed cluster.  Uses the
/// lower bound on m^+ in H (H decreases in m^+, so this is the worst case).
inline double mixed_mass_floor(const BoundInputs& b) {
  const MassPair h = H_constants(b, largest_cluster_lower_bound(b));
  return std::min(improvement_floor(h[0]), improvement_floor(h[1]));
}

inline double mixed_mass_floor(const ProblemParams& p) {
  return mixed_mass_floor(BoundInputs::from(p));
}

struct BoundsOptions {
  /// Ball-minimality thresholds m_{i,B}; when set they cap m_{i,S}.
  std::optional<MassPair> ball_threshold;
};

/// All constants of the cluster-count argument and the assembled bound K.
///
/// Counts are stored as doubles: K routinely exceeds 2^64 for moderate
/// parameters.  Values are exact integers below 2^53.
struct BoundsReport {
  MassPair m_S{};          ///< merging thresholds, capped at M1 + M2
  MassPair m_plus_lb{};    ///< lower bounds on the largest phase masses
  MassPair H{};            ///< cost rates at m_plus_lb
  MassPair eps_case{};     ///< per-case floors (c / H_i)^3
  double eps_min = 0.0;
  double upper_energy = 0.0;  ///< two-ball energy U
  double K_pure = 0.0;
  double K_mixed = 0.0;
  double K = 0.0;
};

/// Number of clusters exempt from the mixed-mass floor: the clusters that
/// carry the largest mass of each phase.
inline constexpr double kExemptLargestClusters = 2.0;

inline BoundsReport cluster_count_bound(const BoundInputs& b, const BoundsOptions& opt = {}) {
  BoundsReport r;
  r.upper_energy = two_ball_upper_bound(b);
  const double cap = b.M1 + b.M2;
  const double gam[2] = {b.gamma11, b.gamma22};
  for (int i = 0; i < 2; ++i) {
    r.m_S[i] = std::min(merge_threshold(gam[i]), cap);
    if (opt.ball_threshold) r.m_S[i] = std::min(r.m_S[i], (*opt.ball_threshold)[i]);
  }
  r.m_plus_lb = largest_cluster_lower_bound(b);
  r.H = H_constants(b, r.m_plus_lb);
  r.eps_case = {improvement_floor(r.H[0]), improvement_floor(r.H[1])};
  r.eps_min = std::min(r.eps_case[0], r.eps_case[1]);

  // At most one pure phase-i cluster lies below m_S; the rest weigh >= m_S.
  r.K_pure = (1.0 + std::floor(b.M1 / r.m_S[0])) + (1.0 + std::floor(b.M2 / r.m_S[1]));
  r.K_mixed = kExemptLargestClusters + std::floor(cap / r.eps_min);
  r.K = r.K_pure + r.K_mixed;
  return r;
}

/// Reads gamma12 from `p` only through BoundInputs, i.e. not at all.
inline BoundsReport cluster_count_bound(const ProblemParams& p, const BoundsOptions& opt = {}) {
  validate_params(p);
  return cluster_count_bound(BoundInputs::from(p), opt);
}

}  // namespace tridrop
