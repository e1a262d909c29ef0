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

#include "tridrop/bubble_geometry.hpp"

namespace tridrop {
namespace {

constexpr double kPiT = 3.14159265358979323846;
const double kSphere = std::cbrt(36.0 * kPiT);

// Oracle: rebuild the bubble from the two outer radii alone (the outer
// spheres meet at 120 degrees, so their centers are sqrt(r1^2 + r2^2 - r1 r2)
// apart) and integrate area and volume as frustum sums along the meridian.
struct Profile {
  std::vector<double> rho, z;
  void add(double r, double zz) { rho.push_back(r), z.push_back(zz); }
  double area() const {
    double s = 0.0;
    for (std::size_t i = 1; i < rho.size(); ++i)
      s += kPiT * (rho[i] + rho[i - 1]) * std::hypot(rho[i] - rho[i - 1], z[i] - z[i - 1]);
    return s;
  }
  double volume() const {  // solid of revolution between the curve and the axis
    double s = 0.0;
    for (std::size_t i = 1; i < rho.size(); ++i)
      s += kPiT / 3.0 *
           (rho[i] * rho[i] + rho[i] * rho[i - 1] + rho[i - 1] * rho[i - 1]) *
           std::abs(z[i] - z[i - 1]);
    return s;
  }
};

struct OracleBubble {
  double area = 0.0, v_big = 0.0, v_small = 0.0;
};

OracleBubble cap_integration(double rb, double rs, int n = 40000) {
  const double d = std::sqrt(rb * rb + rs * rs - rb * rs);
  const double zj = (rb * rb - rs * rs + d * d) / (2.0 * d);
  const double a = std::sqrt(rb * rb - zj * zj);
  Profile big, small, sep;
  const double phi_b = std::acos(-zj / rb);
  for (int i = 0; i <= n; ++i) {
    const double t = phi_b * i / n;
    big.add(rb * std::sin(t), -rb * std::cos(t));
  }
  const double phi_s = std::acos((zj - d) / rs);
  for (int i = 0; i <= n; ++i) {
    const double t = phi_s * i / n;
    small.add(rs * std::sin(t), d + rs * std::cos(t));
  }
  double bulge = 0.0, sep_area = kPiT * a * a;
  if (rb != rs) {
    const double r0 = rb * rs / (rb - rs);
    const double c0 = zj + std::sqrt(r0 * r0 - a * a);
    const double chi = std::asin(a / r0);
    for (int i = 0; i <= n; ++i) {
      const double t = chi * i / n;
      sep.add(r0 * std::sin(t), c0 - r0 * std::cos(t));
    }
    sep_area = sep.area();
    // Region between the junction plane and the separating cap.
    bulge = sep.volume();
  }
  OracleBubble o;
  o.area = big.area() + small.area() + sep_area;
  o.v_big = big.volume() - bulge;
  o.v_small = small.volume() + bulge;
  return o;
}

TEST(SphereArea, Examples) {
  EXPECT_NEAR(sphere_area(1.0), 4.835975862049408, 1e-14);
  EXPECT_EQ(sphere_area(0.0), 0.0);
  EXPECT_NEAR(sphere_area(8.0), 4.0 * kSphere, 1e-13);
  EXPECT_THROW(sphere_area(-1.0), Error);
}

TEST(SolveDoubleBubble, SymmetricIsFlat) {
  const auto g = solve_double_bubble(1.0, 1.0);
  EXPECT_TRUE(std::isinf(g.r0));
  // Equal lobes: each is a sphere of radius R cut at R/2 from its center,
  // so V = 9 pi R^3 / 8 and the total area is 27 pi R^2 / 4.
  const double R = std::cbrt(8.0 / (9.0 * kPiT));
  EXPECT_NEAR(g.total_area(), 27.0 * kPiT * R * R / 4.0, 1e-12);
  EXPECT_GE(g.total_area(), 8.674);
  EXPECT_LE(g.total_area(), 9.672);
}

TEST(SolveDoubleBubble, MatchesCapIntegrationOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 1.0);
  std::vector<std::pair<double, double>> pairs = {{1, 1}, {2, 1}, {1, 2}, {3, 7}, {1, 1e-3}};
  for (int i = 0; i < 20; ++i) pairs.push_back({std::pow(10.0, u(rng)), std::pow(10.0, u(rng))});
  for (auto [m1, m2] : pairs) {
    const auto g = solve_double_bubble(m1, m2);
    const bool one_big = g.r1 >= g.r2;
    const auto o = cap_integration(one_big ? g.r1 : g.r2, one_big ? g.r2 : g.r1);
    const double vb = one_big ? m1 : m2, vs = one_big ? m2 : m1;
    EXPECT_NEAR(o.area, g.total_area(), 1e-7 * g.total_area()) << m1 << " " << m2;
    EXPECT_NEAR(o.v_big, vb, 1e-7 * vb) << m1 << " " << m2;
    EXPECT_NEAR(o.v_small, vs, 1e-6 * vs) << m1 << " " << m2;
  }
}

TEST(SolveDoubleBubble, Invariants) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1e-3, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double m1 = u(rng), m2 = u(rng);
    const auto g = solve_double_bubble(m1, m2);
    const auto res = bubble_residuals(g);
    EXPECT_LT(res.max(), 1e-10);
    // Curvature balance with the signed separating radius.
    EXPECT_NEAR(1.0 / g.r0, 1.0 / g.r2 - 1.0 / g.r1, 1e-10 * (1.0 / g.r2 + 1.0 / g.r1));
    EXPECT_EQ(m1 >= m2, g.r1 >= g.r2);
  }
}

TEST(SolveDoubleBubble, DegeneratesToSphere) {
  const double s = double_bubble_area(1.0, 1e-6);
  const double two = sphere_area(1.0) + sphere_area(1e-6);
  EXPECT_NEAR(s, two, 1e-3 * two);
  EXPECT_NEAR(double_bubble_area(1.0, 1e-6), sphere_area(1.0), 1e-3);
  // Below the cutoff the small volume is dropped.
  const auto g = solve_double_bubble(1.0, 1e-13);
  EXPECT_TRUE(g.degenerate);
  EXPECT_NEAR(g.total_area(), sphere_area(1.0), 1e-12);
}

TEST(SolveDoubleBubble, Deterministic) {
  const auto a = solve_double_bubble(2.0, 0.7), b = solve_double_bubble(2.0, 0.7);
  EXPECT_EQ(a.total_area(), b.total_area());
  EXPECT_EQ(a.r0, b.r0);
}

TEST(SolveDoubleBubble, RejectsNonPositive) {
  EXPECT_THROW(solve_double_bubble(0.0, 1.0), Error);
  EXPECT_THROW(solve_double_bubble(1.0, -1.0), Error);
}

TEST(DoubleBubbleArea, Examples) {
  EXPECT_NEAR(double_bubble_area(1.0, 0.0), 4.835976, 1e-6);
  EXPECT_NEAR(double_bubble_area(1.0, 1.0), 9.139421678069, 1e-11);
  EXPECT_GE(double_bubble_area(2.0, 1.0), hutchings_lower_bound(2.0, 1.0));
  EXPECT_THROW(double_bubble_area(0.0, 0.0), Error);
}

TEST(HutchingsLowerBound, Examples) {
  EXPECT_NEAR(hutchings_lower_bound(1.0, 0.0), kSphere, 1e-14);
  EXPECT_NEAR(hutchings_lower_bound(1.0, 1.0), kSphere / 2.0 * (2.0 + std::cbrt(4.0)), 1e-13);
  EXPECT_NEAR(hutchings_lower_bound(1.0, 1.0), 2.417988 * (2.0 + 1.587401), 1e-5);
  EXPECT_EQ(hutchings_lower_bound(0.0, 0.0), 0.0);
  EXPECT_THROW(hutchings_lower_bound(-1.0, 0.0), Error);
}

TEST(CheckMonotonicity, Examples) {
  EXPECT_TRUE(check_monotonicity(1.0, 1.0, 0.5));
  EXPECT_TRUE(check_monotonicity(1.0, 1.0, 0.0));
  EXPECT_TRUE(check_monotonicity(1.0, 1.0, 1.0));
  EXPECT_LE(double_bubble_area(1.0, 0.0), double_bubble_area(1.0, 1.0));
}

TEST(DoubleBubbleArea, RandomProperties) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  auto draw = [&] {
    double x;
    do x = u(rng); while (x == 0.0);
    return x;
  };
  for (int i = 0; i < 200; ++i) {
    const double m1 = draw(), m2 = draw();
    const double s = double_bubble_area(m1, m2);
    EXPECT_GE(s, hutchings_lower_bound(m1, m2) - 1e-9);
    EXPECT_LE(s, sphere_area(m1) + sphere_area(m2) + 1e-9);
    EXPECT_NEAR(double_bubble_area(m2, m1), s, 1e-10 * s);
    for (double lam : {0.1, 2.0, 10.0})
      EXPECT_NEAR(double_bubble_area(lam * m1, lam * m2), std::pow(lam, 2.0 / 3.0) * s, 1e-8 * s);
    const double x = u(rng) / 10.0 * m2;
    EXPECT_TRUE(check_monotonicity(m1, m2, x));
  }
}

}  // namespace
}  // namespace tridrop
