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

#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>

#include "tridrop/bounds.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/energy.hpp"

namespace tridrop {

enum class MoveCase { Case1, Case2 };

inline std::string_view to_string(MoveCase c) { return c == MoveCase::Case1 ? "case1" : "case2"; }

inline constexpr std::size_t kNoCluster = std::numeric_limits<std::size_t>::max();

/// A competitor built from a configuration: all of one phase (and a
/// proportional share r of the other) moves from a small mixed cluster into
/// the cluster holding the largest mass of that phase, which is dilated by
/// (1 + r)^{1/3}.  What is left of the small cluster becomes a pure ball.
///
/// Case1 moves phase 1 into the largest phase-1 cluster; Case2 mirrors it.
struct CompetitorMove {
  MoveCase case_tag = MoveCase::Case1;
  std::size_t source_k = 0;
  std::size_t target = 0;
  double r = 0.0;
  Configuration result;
  double energy_delta_bound = 0.0;

  double eps = 0.0;       ///< moved mass of the case's phase
  double H = 0.0;         ///< 3 U / (largest mass of that phase), actual value
  double leftover = 0.0;  ///< mass of the replacement ball
  std::size_t result_target = 0;
  std::size_t result_ball = kNoCluster;

  int phase() const { return case_tag == MoveCase::Case1 ? 1 : 2; }
  /// The necessary condition for optimality fails: the move strictly lowers
  /// the energy bound.
  bool improving() const { return eps < improvement_floor(H); }
};

/// Index of the cluster with the largest mass of `phase`; ties go to the
/// lowest index.
inline std::size_t largest_cluster(const Configuration& c, int phase) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.size(); ++k)
    if (c[k].masses().of(phase) > c[best].masses().of(phase)) best = k;
  return best;
}

namespace detail {

inline CompetitorMove competitor_move(const Configuration& c, std::size_t k, int phase) {
  if (k >= c.size()) throw Error(ErrorCode::IndexOutOfRange, "k", "no such cluster");
  const ClusterAnsatz& small = c[k];
  if (!small.masses().mixed())
    throw Error(ErrorCode::NotMixed, "k", "competitor moves need a mixed cluster");
  const int other = 3 - phase;
  const std::size_t target = largest_cluster(c, phase);
  if (target == k)
    throw Error(ErrorCode::PreconditionViolated, "k",
                "cluster holds the largest mass of the moving phase");

  const double top = c[target].masses().of(phase);
  const double partner = c[target].masses().of(other);
  const double eps = small.masses().of(phase);
  const double eps_other = small.masses().of(other);
  const double r = eps / top;
  double moved_other = r * partner;
  // Ratio test top/partner >= eps/eps_other, with rounding slack at equality.
  if (moved_other > eps_other * (1.0 + 1e-12))
    throw Error(ErrorCode::PreconditionViolated, "k", "ratio test of the case fails");
  moved_other = std::min(moved_other, eps_other);

  CompetitorMove mv{.result = phase == 1
                                  ? apply_mass_transfer(c, k, target, eps, moved_other)
                                  : apply_mass_transfer(c, k, target, moved_other, eps)};
  mv.case_tag = phase == 1 ? MoveCase::Case1 : MoveCase::Case2;
  mv.source_k = k;
  mv.target = target;
  mv.r = r;
  mv.eps = eps;
  mv.leftover = eps_other - moved_other;
  mv.H = 3.0 * two_ball_upper_bound(c.params()) / top;
  mv.energy_delta_bound = energy_delta_bound(eps, mv.H);

  const bool source_gone = mv.leftover == 0.0;
  mv.result_target = target - (source_gone && k < target ? 1 : 0);
  mv.result_ball = source_gone ? kNoCluster : k;

  // Separated balls keep their shape under dilation: stretch the distance.
  const ClusterAnsatz& old_target = c[target];
  if (old_target.kind() == ShapeKind::SeparatedBalls) {
    auto clusters = mv.result.clusters();
    const ClusterAnsatz& moved = clusters[mv.result_target];
    const double d = std::get<SeparatedBalls>(old_target.shape()).center_distance *
                     std::cbrt(1.0 + r);
    clusters[mv.result_target] = ClusterAnsatz::reshape(moved.masses(), SeparatedBalls{d});
    mv.result = Configuration::make(std::move(clusters), c.params());
  }
  return mv;
}

}  // namespace detail

/// Moves phase-1 mass eps1 and r * m2 (r = eps1 / m1^+) from cluster k into
/// the largest phase-1 cluster.
inline CompetitorMove case1_move(const Configuration& c, std::size_t k) {
  return detail::competitor_move(c, k, 1);
}

/// Mirror of case1_move with the phases exchanged.
inline CompetitorMove case2_move(const Configuration& c, std::size_t k) {
  return detail::competitor_move(c, k, 2);
}

/// Picks Case1 when m1^+ / m2^+ >= eps1 / eps2, else Case2; one of the two
/// ratio tests always holds.  If the chosen case would target k itself the
/// other case is used (its ratio test then holds trivially).  Refuses only
/// when k holds the largest mass of both phases.
inline CompetitorMove dispatch_move(const Configuration& c, std::size_t k) {
  if (k >= c.size()) throw Error(ErrorCode::IndexOutOfRange, "k", "no such cluster");
  if (!c[k].masses().mixed())
    throw Error(ErrorCode::NotMixed, "k", "competitor moves need a mixed cluster");
  const std::size_t t1 = largest_cluster(c, 1), t2 = largest_cluster(c, 2);
  if (t1 == k && t2 == k)
    throw Error(ErrorCode::PreconditionViolated, "k",
                "cluster holds the largest mass of both phases");
  const double m1p = c[t1].m1(), m2p = c[t2].m2();
  const double eps1 = c[k].m1(), eps2 = c[k].m2();
  bool first = m1p * eps2 >= eps1 * m2p;
  if (first && t1 == k) first = false;
  if (!first && t2 == k) first = true;
  return first ? case1_move(c, k) : case2_move(c, k);
}

/// One inequality of the chain, lhs <= rhs, with the Monte-Carlo standard
/// error of lhs - rhs.
struct ChainLink {
  double lhs = 0.0;
  double rhs = 0.0;
  double std_error = 0.0;

  /// rhs - lhs; non-negative when the inequality holds.
  double slack() const { return rhs - lhs; }
  bool holds() const {
    return lhs - rhs <= 3.0 * std_error + 1e-12 * (std::abs(lhs) + std::abs(rhs));
  }
};

struct ChainReport {
  MoveCase case_tag = MoveCase::Case1;
  double r = 0.0;
  double eps = 0.0;
  double H = 0.0;
  double eps_floor = 0.0;  ///< (c / H)^3

  /// E((1+r)^{1/3} target) <= (1 + 3r) E(target)
  ChainLink scaling;
  /// E(leftover ball) - E(cluster k) <= -c eps^{2/3}
  ChainLink replacement;
  /// energy change <= eps H - c eps^{2/3}
  ChainLink total;

  double energy_before = 0.0;  ///< configuration energy of c
  double energy_after = 0.0;   ///< configuration energy of the competitor
  double energy_std_error = 0.0;

  /// eps < (c/H)^3: the competitor strictly improves on c, so c is not optimal.
  bool improving = false;

  bool all_hold() const { return scaling.holds() && replacement.holds() && total.holds(); }
};

/// Evaluates every link of the competitor's energy chain with the energy
/// module and re-scores both configurations directly.
inline ChainReport verify_chain(const Configuration& c, const CompetitorMove& mv,
                                const QuadratureSpec& spec) {
  if (mv.source_k >= c.size() || mv.target >= c.size())
    throw Error(ErrorCode::IndexOutOfRange, "move", "move does not fit the configuration");
  if (!c[mv.source_k].masses().mixed())
    throw Error(ErrorCode::NotMixed, "move", "source cluster is not mixed");

  const ProblemParams& p = c.params();
  ChainReport rep;
  rep.case_tag = mv.case_tag;
  rep.r = mv.r;
  rep.eps = mv.eps;
  rep.H = mv.H;
  rep.eps_floor = improvement_floor(mv.H);
  rep.improving = mv.improving();

  const EnergyBreakdown e_target = cluster_energy(c[mv.target], p, spec);
  const EnergyBreakdown e_scaled = cluster_energy(mv.result[mv.result_target], p, spec);
  const EnergyBreakdown e_small = cluster_energy(c[mv.source_k], p, spec);
  const double e_ball = mv.result_ball == kNoCluster
                            ? 0.0
                            : cluster_energy(mv.result[mv.result_ball], p, spec).total;

  rep.scaling = {e_scaled.total, (1.0 + 3.0 * mv.r) * e_target.total,
                 std::hypot(e_scaled.std_error, (1.0 + 3.0 * mv.r) * e_target.std_error)};
  rep.replacement = {e_ball - e_small.total,
                     -kHalfSphereAreaCoeff * pow_two_thirds(mv.eps), e_small.std_error};

  const EnergyBreakdown before = configuration_energy(c, spec);
  const EnergyBreakdown after = configuration_energy(mv.result, spec);
  rep.energy_before = before.total;
  rep.energy_after = after.total;
  rep.energy_std_error = std::hypot(before.std_error, after.std_error);

  const double delta = (e_scaled.total - e_target.total) + (e_ball - e_small.total);
  rep.total = {delta, mv.energy_delta_bound,
               std::sqrt(e_scaled.std_error * e_scaled.std_error +
                         e_target.std_error * e_target.std_error +
                         e_small.std_error * e_small.std_error)};
  return rep;
}

}  // namespace tridrop
