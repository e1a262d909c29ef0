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
#include <variant>

#include "tridrop/bubble_geometry.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/coulomb.hpp"

namespace tridrop {

/// Per-term split of the cluster energy.  `cross` already carries the factor
/// 2 from the (1,2) and (2,1) entries of the symmetric double sum.
struct EnergyBreakdown {
  double perimeter = 0.0;
  double self1 = 0.0;
  double self2 = 0.0;
  double cross = 0.0;
  double total = 0.0;
  double std_error = 0.0;
  bool relaxed = false;  ///< contains a SeparatedBalls cluster

  EnergyBreakdown& operator+=(const EnergyBreakdown& o) {
    perimeter += o.perimeter;
    self1 += o.self1;
    self2 += o.self2;
    cross += o.cross;
    total += o.total;
    std_error = std::hypot(std_error, o.std_error);
    relaxed = relaxed || o.relaxed;
    return *this;
  }
};

/// Perimeter plus gamma-weighted self energy of a single ball.
inline double ball_energy(double m, double weight) {
  return sphere_area(m) + weight * ball_self_energy(m).value;
}

inline EnergyBreakdown cluster_energy(const ClusterAnsatz& a, const ProblemParams& p,
                                      const QuadratureSpec& spec) {
  EnergyBreakdown e;
  const double w11 = p.weight11(), w22 = p.weight22(), w12 = p.weight12();

  if (const auto* ball = std::get_if<SingleBall>(&a.shape())) {
    const double m = a.masses().of(ball->phase);
    e.perimeter = sphere_area(m);
    (ball->phase == 1 ? e.self1 : e.self2) =
        (ball->phase == 1 ? w11 : w22) * ball_self_energy(m).value;
  } else if (const auto* sep = std::get_if<SeparatedBalls>(&a.shape())) {
    e.perimeter = sphere_area(a.m1()) + sphere_area(a.m2());
    e.self1 = w11 * ball_self_energy(a.m1()).value;
    e.self2 = w22 * ball_self_energy(a.m2()).value;
    e.cross = 2.0 * w12 * ball_pair_interaction(a.m1(), a.m2(), sep->center_distance).value;
    e.relaxed = true;
  } else {
    const DoubleBubbleGeometry g = solve_double_bubble(a.m1(), a.m2());
    e.perimeter = g.total_area();
    auto term = [&](double w, int i, int j, double& out) {
      if (w == 0.0) return 0.0;
      const CoulombValue v = bubble_coulomb(g, i, j, spec);
      out = w * v.value;
      return w * v.std_error;
    };
    const double s11 = term(w11, 1, 1, e.self1);
    const double s22 = term(w22, 2, 2, e.self2);
    const double s12 = term(2.0 * w12, 1, 2, e.cross);
    e.std_error = std::sqrt(s11 * s11 + s22 * s22 + s12 * s12);
  }
  e.total = e.perimeter + e.self1 + e.self2 + e.cross;
  return e;
}

/// Sum of cluster energies in index order; clusters do not interact.
inline EnergyBreakdown configuration_energy(const Configuration& c, const QuadratureSpec& spec) {
  EnergyBreakdown sum;
  for (const auto& cl : c.clusters()) sum += cluster_energy(cl, c.params(), spec);
  return sum;
}

/// Energy of the configuration made of one ball per phase.  Takes only the
/// reduced parameters: the cross coefficient cannot enter.
inline double two_ball_upper_bound(const BoundInputs& b) {
  return ball_energy(b.M1, b.gamma11) + ball_energy(b.M2, b.gamma22);
}

inline double two_ball_upper_bound(const ProblemParams& p) {
  return two_ball_upper_bound(BoundInputs::from(p));
}

}  // namespace tridrop
