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
#include <vector>

#include <gtest/gtest.h>

#include "tridrop/optimizer.hpp"

namespace tridrop {
namespace {

QuadratureSpec mc(std::uint64_t samples, std::uint64_t seed = 42) {
  QuadratureSpec s;
  s.samples = samples;
  s.seed = seed;
  return s;
}

TEST(E0Approx, PureClusterIsABall) {
  const ProblemParams p{1, 1, 2, 1, 3};
  const auto v = e0_approx(0.7, 0.0, p, mc(50'000));
  EXPECT_EQ(v.shape, ShapeKind::SingleBall);
  EXPECT_EQ(v.energy, ball_energy(0.7, 2.0));
  EXPECT_EQ(e0_approx(0.0, 0.7, p, mc(50'000)).energy, ball_energy(0.7, 3.0));
}

TEST(E0Approx, SymmetricWinnerWithoutCrossTerm) {
  // Regression anchor: the double bubble wins by about 0.58 at (1, 1), far
  // beyond the quadrature error.
  const ProblemParams p{1, 1, 1, 0, 1};
  const auto v = e0_approx(1.0, 1.0, p, mc(200'000));
  EXPECT_EQ(v.shape, ShapeKind::StandardDoubleBubble);
  EXPECT_NEAR(v.energy, 12.9608, 0.01);
  EXPECT_LT(v.energy + 10.0 * v.std_error, two_ball_upper_bound(p));
}

TEST(E0Approx, LargeCrossTermSeparatesToTheCap) {
  const ProblemParams p{1, 1, 1, 1000, 1};
  const auto v = e0_approx(1.0, 1.0, p, mc(50'000));
  EXPECT_EQ(v.shape, ShapeKind::SeparatedBalls);
  EXPECT_NEAR(v.distance, separation_cap(1.0, 1.0), 1e-9 * v.distance);
}

TEST(E0Approx, EnvelopeSandwich) {
  for (double g12 : {0.0, 1.0, 5.0})
    for (double m1 : {0.01, 0.3, 1.0, 4.0})
      for (double m2 : {0.0, 0.02, 0.5, 2.0}) {
        const ProblemParams p{1, 1, 1.5, g12, 0.5};
        const auto v = e0_approx(m1, m2, p, mc(50'000, 7));
        EXPECT_GE(v.energy, hutchings_lower_bound(m1, m2) - 1e-9);
        EXPECT_LE(v.energy, separated_envelope(m1, m2, p) + 1e-12);
      }
}

class ModelTest : public ::testing::Test {
 protected:
  static const E0Model& unit_model() {
    static const E0Model m(ProblemParams{1, 1, 1, 1, 1}, mc(100'000));
    return m;
  }
};

TEST_F(ModelTest, AgreesWithDirectEvaluation) {
  const E0Model& model = unit_model();
  EXPECT_LT(model.table_relative_error(), 0.01);
  const ProblemParams& p = model.params();
  for (auto [m1, m2] : {std::pair{1.0, 1.0}, std::pair{0.3, 0.7}, std::pair{0.05, 0.02}}) {
    const double direct = cluster_energy(ClusterAnsatz::double_bubble(m1, m2), p, mc(400'000, 3)).total;
    const double tab = model.double_bubble_energy(m1, m2);
    EXPECT_NEAR(tab, direct, 0.01 * direct) << m1 << " " << m2;
  }
}

TEST_F(ModelTest, SurfaceDegenerateGridIsExact) {
  const E0Model& model = unit_model();
  const auto s = build_e0_surface(model, {0.2, 0.4}, {0.1, 0.3});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      const double m1 = s.m1_grid[i], m2 = s.m2_grid[j];
      EXPECT_EQ(s.interpolate(m1, m2), model(m1, m2).energy);
      EXPECT_EQ(s.winner(i, j), model(m1, m2).shape);
    }
}

TEST_F(ModelTest, SurfaceRefinementApproachesDirectValues) {
  const E0Model& model = unit_model();
  auto grid = [](int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(0.1 + 0.8 * i / n);
    return g;
  };
  const std::vector<std::pair<double, double>> probes = {{0.3, 0.6}, {0.55, 0.15}, {0.82, 0.77}};
  std::vector<double> prev(probes.size(), std::numeric_limits<double>::infinity());
  for (int n : {2, 4, 8, 16}) {
    const auto s = build_e0_surface(model, grid(n), grid(n));
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const auto [m1, m2] = probes[k];
      const double err = std::abs(s.interpolate(m1, m2) - model(m1, m2).energy);
      EXPECT_LE(err, prev[k] + 1e-12) << n << " " << m1 << " " << m2;
      prev[k] = err;
    }
  }
  for (double e : prev) EXPECT_LT(e, 1e-2);
}

TEST_F(ModelTest, SurfaceRespectsEnvelopes) {
  const E0Model& model = unit_model();
  const std::vector<double> g = {0.0, 0.05, 0.2, 0.6, 1.0};
  const auto s = build_e0_surface(model, g, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[i] + g[j] == 0.0) continue;
      EXPECT_GE(s.at(i, j), hutchings_lower_bound(g[i], g[j]) - 1e-9);
      EXPECT_LE(s.at(i, j), separated_envelope(g[i], g[j], model.params()) + 1e-12);
    }
  EXPECT_THROW(build_e0_surface(model, {}, g), Error);
}

std::size_t phase1_clusters(const Configuration& c) {
  std::size_t n = 0;
  for (const auto& a : c.clusters()) n += a.m1() > 0.0;
  return n;
}

void expect_no_improving_competitor(const Configuration& c) {
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!c[k].masses().mixed()) continue;
    try {
      EXPECT_FALSE(dispatch_move(c, k).improving()) << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::PreconditionViolated);
    }
  }
}

TEST(MinimizeE0, SmallMassesMergeIntoOneCluster) {
  const ProblemParams p{0.01, 0.01, 1, 1, 1};
  const auto r = minimize_E0(p, kDefaultBudget, 1, mc(100'000));
  EXPECT_EQ(r.configuration.size(), 1u);
  EXPECT_LE(r.energy, two_ball_upper_bound(p));
}

TEST(MinimizeE0, BinaryProblemSplitsOnlyForLargeGamma) {
  // M2 must be positive; a trace of phase 2 stands in for the binary case.
  const auto many = minimize_E0(ProblemParams{1, 1e-6, 10, 0, 1}, 20'000, 3, mc(50'000));
  EXPECT_GE(phase1_clusters(many.configuration), 2u);
  const auto one = minimize_E0(ProblemParams{1, 1e-6, 0.01, 0, 1}, 20'000, 3, mc(50'000));
  EXPECT_EQ(phase1_clusters(one.configuration), 1u);
  // Binary liquid drop with gamma = 10: n equal balls cost
  // A n^{1/3} + 10 kappa n^{-2/3}, minimised at n = 20 kappa / A = 8.
  EXPECT_EQ(phase1_clusters(many.configuration), 8u);
}

TEST_F(ModelTest, ResultsAreBoundedReproducibleAndMonotone) {
  const E0Model& model = unit_model();
  const ProblemParams& p = model.params();
  const auto K = cluster_count_bound(p).K;
  const auto a = minimize_E0(model, 20'000, 11);
  const auto b = minimize_E0(model, 20'000, 11);
  EXPECT_EQ(a.energy, b.energy);
  ASSERT_EQ(a.configuration.size(), b.configuration.size());
  for (std::size_t k = 0; k < a.configuration.size(); ++k) {
    EXPECT_EQ(a.configuration[k].m1(), b.configuration[k].m1());
    EXPECT_EQ(a.configuration[k].m2(), b.configuration[k].m2());
  }
  EXPECT_EQ(a.best_history, b.best_history);
  EXPECT_LE(static_cast<double>(a.configuration.size()), K);
  EXPECT_LE(a.energy, two_ball_upper_bound(p));
  for (std::size_t i = 1; i < a.best_history.size(); ++i)
    EXPECT_LE(a.best_history[i], a.best_history[i - 1]);
  expect_no_improving_competitor(a.configuration);
}

TEST_F(ModelTest, MultiChainPicksTheBestSeed) {
  const E0Model& model = unit_model();
  const std::vector<std::uint64_t> seeds = {5, 6, 7};
  const auto best = minimize_E0_multi(model, 5'000, seeds);
  double lowest = std::numeric_limits<double>::infinity();
  std::uint64_t who = 0;
  for (auto s : seeds) {
    const auto r = minimize_E0(model, 5'000, s);
    if (r.energy < lowest) lowest = r.energy, who = s;
  }
  EXPECT_EQ(best.energy, lowest);
  EXPECT_EQ(best.seed, who);
  // Identical chains tie; the lowest seed wins.
  const std::vector<std::uint64_t> same = {9, 9};
  EXPECT_EQ(minimize_E0_multi(model, 2'000, same).seed, 9u);
}

TEST(MinimizeE0, BoundComplianceAcrossParameters) {
  for (auto p : {ProblemParams{0.5, 0.2, 2, 1, 0.5}, ProblemParams{2, 1, 0.3, 3, 0.3},
                 ProblemParams{0.05, 0.1, 5, 0, 5}}) {
    const auto r = minimize_E0(p, 10'000, 2, mc(50'000));
    EXPECT_LE(static_cast<double>(r.configuration.size()), cluster_count_bound(p).K);
    EXPECT_LE(r.energy, two_ball_upper_bound(p));
    auto [m1, m2] = total_masses(r.configuration);
    EXPECT_NEAR(m1, p.M1, 1e-12 * p.M1);
    EXPECT_NEAR(m2, p.M2, 1e-12 * p.M2);
    expect_no_improving_competitor(r.configuration);
  }
}

TEST(MinimizeE0, RejectsZeroBudget) {
  EXPECT_THROW(minimize_E0(ProblemParams{1, 1, 0, 0, 0}, 0, 1, mc(50'000)), Error);
}

}  // namespace
}  // namespace tridrop
