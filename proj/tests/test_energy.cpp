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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tridrop/energy.hpp"

namespace tridrop {
namespace {

constexpr double kPiT = 3.14159265358979323846;
// Independent constants: (36 pi)^{1/3} and 32 pi^2 R^5 / 15 for unit volume.
const double kArea1 = std::cbrt(36.0 * kPiT);
const double kKappa = 32.0 * kPiT * kPiT / 15.0 * std::pow(3.0 / (4.0 * kPiT), 5.0 / 3.0);

ProblemParams params(double M1, double M2, double g11, double g12, double g22) {
  return {M1, M2, g11, g12, g22};
}

QuadratureSpec analytic() {
  QuadratureSpec s;
  s.method = QuadratureMethod::analytic;
  return s;
}

QuadratureSpec mc(std::uint64_t samples, std::uint64_t seed) {
  QuadratureSpec s;
  s.samples = samples;
  s.seed = seed;
  return s;
}

void expect_consistent(const EnergyBreakdown& e) {
  EXPECT_NEAR(e.total, e.perimeter + e.self1 + e.self2 + e.cross, 1e-12 * std::abs(e.total));
  EXPECT_GE(e.perimeter, 0.0);
  EXPECT_GE(e.self1, 0.0);
  EXPECT_GE(e.self2, 0.0);
  EXPECT_GE(e.cross, 0.0);
}

TEST(ClusterEnergy, SingleBall) {
  const auto a = ClusterAnsatz::single_ball(1, 1.0);
  const auto e = cluster_energy(a, params(1, 1, 1, 1, 1), analytic());
  EXPECT_NEAR(e.perimeter, kArea1, 1e-13);
  EXPECT_NEAR(e.self1, kKappa, 1e-13);
  EXPECT_NEAR(e.self1, 1.934, 1e-3);
  EXPECT_EQ(e.self2, 0.0);
  EXPECT_EQ(e.cross, 0.0);
  EXPECT_FALSE(e.relaxed);
  expect_consistent(e);

  const auto z = cluster_energy(a, params(1, 1, 0, 1, 1), analytic());
  EXPECT_NEAR(z.total, 4.836, 1e-3);
  EXPECT_EQ(z.total, z.perimeter);
}

TEST(ClusterEnergy, SeparatedBalls) {
  const auto a = ClusterAnsatz::separated_balls(1.0, 1.0, 10.0);
  const auto e = cluster_energy(a, params(1, 1, 1, 1, 1), analytic());
  EXPECT_NEAR(e.perimeter, 2.0 * kArea1, 1e-12);
  EXPECT_NEAR(e.self1 + e.self2, 2.0 * kKappa, 1e-12);
  EXPECT_NEAR(e.cross, 0.2, 1e-15);
  EXPECT_NEAR(e.total, 2.0 * kArea1 + 2.0 * kKappa + 0.2, 1e-12);
  EXPECT_TRUE(e.relaxed);
  expect_consistent(e);
}

TEST(ClusterEnergy, DoubleBubbleAboveAreaBounds) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 3.0), g(0.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double m1 = u(rng), m2 = u(rng);
    const auto p = params(m1, m2, g(rng), g(rng), g(rng));
    const auto e = cluster_energy(ClusterAnsatz::double_bubble(m1, m2), p, mc(50'000, 100 + i));
    const double S = double_bubble_area(m1, m2);
    EXPECT_NEAR(e.perimeter, S, 1e-12 * S);
    EXPECT_GE(e.total, S);
    EXPECT_GE(S, hutchings_lower_bound(m1, m2));
    expect_consistent(e);
  }
}

TEST(ClusterEnergy, DoubleBubbleWithoutCoulombNeedsNoQuadrature) {
  const auto e =
      cluster_energy(ClusterAnsatz::double_bubble(1.0, 1.0), params(1, 1, 0, 0, 0), analytic());
  EXPECT_NEAR(e.total, 9.139421678069, 1e-11);
  EXPECT_THROW(
      cluster_energy(ClusterAnsatz::double_bubble(1.0, 1.0), params(1, 1, 1, 0, 0), analytic()),
      Error);
}

TEST(ConfigurationEnergy, TwoBallsHaveNoCrossTerm) {
  for (double g12 : {0.0, 1.0, 10.0}) {
    const auto p = params(1.0, 2.0, 1.0, g12, 0.5);
    const auto c = Configuration::make(
        {ClusterAnsatz::single_ball(1, 1.0), ClusterAnsatz::single_ball(2, 2.0)}, p);
    const auto e = configuration_energy(c, analytic());
    EXPECT_EQ(e.cross, 0.0);
    EXPECT_EQ(e.total, cluster_energy(c[0], p, analytic()).total +
                           cluster_energy(c[1], p, analytic()).total);
    EXPECT_NEAR(e.total, two_ball_upper_bound(p), 1e-12 * e.total);
  }
}

TEST(ConfigurationEnergy, SingleBubbleEqualsClusterEnergy) {
  const auto p = params(1, 1, 1, 1, 1);
  const auto c = Configuration::make({ClusterAnsatz::double_bubble(1.0, 1.0)}, p);
  const auto spec = mc(100'000, 3);
  EXPECT_EQ(configuration_energy(c, spec).total, cluster_energy(c[0], p, spec).total);
}

TEST(ConfigurationEnergy, EmptyIsNotConstructible) {
  EXPECT_THROW(Configuration::make({}, params(1, 1, 1, 1, 1)), Error);
}

TEST(ConfigurationEnergy, AdditiveBitExactForAnalyticShapes) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<ClusterAnsatz> cl;
    double M1 = 0.0, M2 = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double a = u(rng), b = u(rng);
      if (k % 3 == 0) cl.push_back(ClusterAnsatz::single_ball(1, a)), M1 += a;
      else if (k % 3 == 1) cl.push_back(ClusterAnsatz::single_ball(2, b)), M2 += b;
      else cl.push_back(ClusterAnsatz::separated_balls(a, b, 5.0 * tangency_distance(a, b))),
          M1 += a, M2 += b;
    }
    const auto p = params(M1, M2, u(rng), u(rng), u(rng));
    const auto c = Configuration::make(cl, p);
    double sum = 0.0;
    for (const auto& a : c.clusters()) sum += cluster_energy(a, p, analytic()).total;
    EXPECT_EQ(configuration_energy(c, analytic()).total, sum);
  }
}

TEST(TwoBallUpperBound, Examples) {
  EXPECT_NEAR(two_ball_upper_bound(params(1, 1, 1, 1, 1)), 2.0 * (kArea1 + kKappa), 1e-12);
  EXPECT_NEAR(two_ball_upper_bound(params(1, 1, 1, 1, 1)), 13.540, 1e-3);
  EXPECT_NEAR(two_ball_upper_bound(params(1, 1, 0, 0, 0)), 9.672, 1e-3);
  EXPECT_EQ(two_ball_upper_bound(params(1, 1, 1, 0, 1)), two_ball_upper_bound(params(1, 1, 1, 10, 1)));
  // The reduced-argument overload has no gamma12 parameter at all.
  static_assert(std::is_invocable_r_v<double, decltype(static_cast<double (*)(const BoundInputs&)>(
                                                  &two_ball_upper_bound)),
                                      const BoundInputs&>);
}

}  // namespace
}  // namespace tridrop
