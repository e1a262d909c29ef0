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
#include <cmath>
#include <limits>

#include "tridrop/constants.hpp"
#include "tridrop/error.hpp"

namespace tridrop {

/// Area of the sphere of volume m.
inline double sphere_area(double m) {
  if (!(m >= 0.0)) throw Error(ErrorCode::NegativeMass, "m", "mass must be >= 0");
  return kSphereAreaCoeff * pow_two_thirds(m);
}

/// Axisymmetric description of a standard double bubble in its own frame:
/// the axis is z, the junction circle (radius `a`) lies in the plane z = 0,
/// the larger lobe L sits above it and the smaller lobe S below.  The
/// separating cap bulges upward into L with curvature k0 >= 0 (flat when
/// k0 == 0).
///
///   L = { |x - zL e_z| <= rL, z >= 0 } \ lens
///   S = { |x - zS e_z| <= rS, z <= 0 } u lens
///   lens = { z >= 0, |x - z0 e_z| <= 1/k0 },  z0 = -sqrt(1/k0^2 - a^2)
struct BubbleFrame {
  double rL = 0.0, zL = 0.0;
  double rS = 0.0, zS = 0.0;
  double a = 0.0;
  double k0 = 0.0;

  double sep_radius() const {
    return k0 > 0.0 ? 1.0 / k0 : std::numeric_limits<double>::infinity();
  }
  /// Height of the separating cap above the junction plane.
  double sep_height() const {
    const double s = std::sqrt(std::max(0.0, 1.0 - a * a * k0 * k0));
    return a * a * k0 / (1.0 + s);
  }
  double sep_center_z() const {
    return k0 > 0.0 ? sep_height() - 1.0 / k0
                    : -std::numeric_limits<double>::infinity();
  }

  bool in_lens(double x, double y, double z) const {
    if (z < 0.0 || k0 == 0.0) return false;
    const double r0 = 1.0 / k0;
    const double dz = z - sep_center_z();
    return x * x + y * y + dz * dz <= r0 * r0;
  }
  bool in_large(double x, double y, double z) const {
    if (z < 0.0) return false;
    const double dz = z - zL;
    return x * x + y * y + dz * dz <= rL * rL && !in_lens(x, y, z);
  }
  bool in_small(double x, double y, double z) const {
    if (rS == 0.0) return false;
    const double dz = z - zS;
    if (z <= 0.0 && x * x + y * y + dz * dz <= rS * rS) return true;
    return in_lens(x, y, z);
  }
};

namespace detail {

inline double cap_volume(double r, double h) {
  return kPi * h * h * (3.0 * r - h) / 3.0;
}

struct UnitBubble {
  BubbleFrame frame;
  double volume_large, volume_small;
  double area_large, area_small, area_sep;
};

/// Double bubble with the larger outer radius fixed at 1 and the smaller at
/// q in (0, 1].  The 120-degree junction and the curvature balance are
/// built in; only the volume ratio remains to be matched.
inline UnitBubble unit_bubble(double q) {
  UnitBubble u{};
  BubbleFrame& f = u.frame;
  // Angle of the large cap's tangent at the junction, from cot = (2-q)/(sqrt3 q).
  const double beta = std::atan2(std::sqrt(3.0) * q, 2.0 - q);
  f.rL = 1.0;
  f.rS = q;
  f.a = std::sin(beta);
  f.zL = std::cos(beta);
  f.zS = -q * std::cos(beta - 2.0 * kPi / 3.0);
  f.k0 = 1.0 / q - 1.0;

  const double s = std::sqrt(std::max(0.0, 1.0 - f.a * f.a * f.k0 * f.k0));
  const double h0 = f.a * f.a * f.k0 / (1.0 + s);
  u.area_sep = 2.0 * kPi * f.a * f.a / (1.0 + s);
  const double v0 = 0.5 * h0 * u.area_sep - kPi * h0 * h0 * h0 / 3.0;

  const double hL = f.rL + f.zL;
  const double hS = f.rS - f.zS;
  u.area_large = 2.0 * kPi * f.rL * hL;
  u.area_small = 2.0 * kPi * f.rS * hS;
  u.volume_large = cap_volume(f.rL, hL) - v0;
  u.volume_small = cap_volume(f.rS, hS) + v0;
  return u;
}

}  // namespace detail

/// Standard double bubble enclosing volumes m1 (phase 1) and m2 (phase 2).
///
/// Radii and angles are reported per phase.  r0 is the signed radius of the
/// separating cap: positive when it bulges into the phase-1 lobe, negative
/// when it bulges into the phase-2 lobe, +inf when flat.  theta1/theta2 are
/// the polar half-angles of the outer caps measured from their poles, theta0
/// the half-angle of the separating cap.
///
/// When one volume is negligible (below 1e-12 of the other) the bubble
/// degenerates to a single sphere: the empty lobe has radius 0.
struct DoubleBubbleGeometry {
  double m1 = 0.0, m2 = 0.0;
  double r1 = 0.0, r2 = 0.0, r0 = std::numeric_limits<double>::infinity();
  double theta1 = 0.0, theta2 = 0.0, theta0 = 0.0;
  double junction_radius = 0.0;
  double area1 = 0.0;  ///< outer cap of lobe 1
  double area2 = 0.0;  ///< outer cap of lobe 2
  double area0 = 0.0;  ///< separating cap
  bool degenerate = false;
  int iterations = 0;

  /// Which phase occupies the larger lobe of `frame`.
  int large_phase = 1;
  /// Frame at physical scale.
  BubbleFrame frame;

  double total_area() const { return area1 + area2 + area0; }
  double volume(int phase) const { return phase == 1 ? m1 : m2; }

  bool contains(int phase, double x, double y, double z) const {
    return phase == large_phase ? frame.in_large(x, y, z)
                                : frame.in_small(x, y, z);
  }
  /// Ball guaranteed to contain the lobe of `phase`: {center (0,0,cz), radius}.
  std::pair<double, double> bounding_ball(int phase) const {
    return phase == large_phase ? std::pair{frame.zL, frame.rL}
                                : std::pair{frame.zS, frame.rS};
  }
};

inline constexpr double kBubbleResidualTol = 1e-10;
inline constexpr int kBubbleMaxIterations = 200;

/// Residuals of the three defining conditions.
struct BubbleResiduals {
  double volume1 = 0.0;    ///< relative
  double volume2 = 0.0;    ///< relative
  double curvature = 0.0;  ///< |1/r0 - (1/r2 - 1/r1)| * min(r1, r2)
  double angle = 0.0;      ///< |sum of unit tangents at the junction|

  double max() const { return std::max({volume1, volume2, curvature, angle}); }
};

namespace detail {

/// Volumes enclosed by the caps of a frame, recomputed from scratch.
inline std::pair<double, double> frame_volumes(const BubbleFrame& f) {
  const double h0 = f.sep_height();
  const double r0 = f.sep_radius();
  const double v0 = f.k0 > 0.0 ? cap_volume(r0, h0) : 0.0;
  const double vL = cap_volume(f.rL, f.rL + f.zL) - v0;
  const double vS = f.rS > 0.0 ? cap_volume(f.rS, f.rS - f.zS) + v0 : 0.0;
  return {vL, vS};
}

}  // namespace detail

inline BubbleResiduals bubble_residuals(const DoubleBubbleGeometry& g) {
  BubbleResiduals r;
  const auto [vL, vS] = detail::frame_volumes(g.frame);
  const double v1 = g.large_phase == 1 ? vL : vS;
  const double v2 = g.large_phase == 1 ? vS : vL;
  r.volume1 = g.m1 > 0.0 ? std::abs(v1 - g.m1) / g.m1 : std::abs(v1);
  r.volume2 = g.m2 > 0.0 ? std::abs(v2 - g.m2) / g.m2 : std::abs(v2);
  if (g.degenerate) return r;

  const double k_sep = std::isinf(g.r0) ? 0.0 : 1.0 / g.r0;
  r.curvature = std::abs(k_sep - (1.0 / g.r2 - 1.0 / g.r1)) * std::min(g.r1, g.r2);

  // Unit tangents leaving the junction point (a, 0) in the (rho, z) plane.
  const BubbleFrame& f = g.frame;
  const double tLr = f.zL / f.rL, tLz = f.a / f.rL;
  const double tSr = -f.zS / f.rS, tSz = -f.a / f.rS;
  const double s0 = f.a * f.k0;
  const double t0r = -std::sqrt(std::max(0.0, 1.0 - s0 * s0)), t0z = s0;
  r.angle = std::hypot(tLr + tSr + t0r, tLz + tSz + t0z);
  return r;
}

namespace detail {

/// A single sphere carrying the larger volume; the other lobe is empty and
/// its (negligible) volume is dropped.
inline DoubleBubbleGeometry degenerate_bubble(double m1, double m2) {
  DoubleBubbleGeometry g;
  g.m1 = m1;
  g.m2 = m2;
  g.large_phase = m1 >= m2 ? 1 : 2;
  const double big = std::max(m1, m2);
  const double R = ball_radius(big);
  g.degenerate = true;
  // The ball sits entirely in z >= 0, touching the junction plane at a point.
  g.frame = BubbleFrame{R, R, 0.0, 0.0, 0.0, 0.0};
  (g.large_phase == 1 ? g.r1 : g.r2) = R;
  (g.large_phase == 1 ? g.theta1 : g.theta2) = kPi;
  (g.large_phase == 1 ? g.area1 : g.area2) = sphere_area(big);
  (g.large_phase == 1 ? g.m2 : g.m1) = 0.0;
  return g;
}

}  // namespace detail

/// Solves the standard double bubble for volumes (m1, m2) by a bracketed
/// secant iteration on the radius ratio, started from the two-sphere guess.
/// Throws ConvergenceFailure if the residuals stay above 1e-10.
inline DoubleBubbleGeometry solve_double_bubble(double m1, double m2) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !std::isfinite(m1) || !std::isfinite(m2))
    throw Error(ErrorCode::NonPositiveMass, !(m1 > 0.0) ? "m1" : "m2",
                "double bubble volumes must be positive");

  DoubleBubbleGeometry g;
  g.m1 = m1;
  g.m2 = m2;
  g.large_phase = m1 >= m2 ? 1 : 2;
  const double big = std::max(m1, m2);
  const double small = std::min(m1, m2);

  if (small < 1e-12 * big) return detail::degenerate_bubble(m1, m2);

  const double target = std::log(small / big);
  auto residual = [&](double q) {
    const auto u = detail::unit_bubble(q);
    return std::log(u.volume_small / u.volume_large) - target;
  };

  double q = 1.0;
  int it = 0;
  if (small < big) {
    // Two-sphere guess, then widen the bracket downward until it straddles.
    double hi = 1.0, f_hi = residual(hi);
    double lo = std::cbrt(small / big), f_lo = residual(lo);
    while (f_lo > 0.0 && it < kBubbleMaxIterations) {
      hi = lo;
      f_hi = f_lo;
      lo *= 0.5;
      f_lo = residual(lo);
      ++it;
    }
    // Illinois variant of regula falsi on log q.
    double x_lo = std::log(lo), x_hi = std::log(hi);
    int side = 0;
    q = lo;
    for (; it < kBubbleMaxIterations; ++it) {
      const double x = (x_lo * f_hi - x_hi * f_lo) / (f_hi - f_lo);
      const double fx = residual(std::exp(x));
      q = std::exp(x);
      if (std::abs(fx) < 1e-14 || std::abs(x_hi - x_lo) < 1e-15) break;
      if (fx < 0.0) {
        x_lo = x;
        f_lo = fx;
        if (side == -1) f_hi *= 0.5;
        side = -1;
      } else {
        x_hi = x;
        f_hi = fx;
        if (side == 1) f_lo *= 0.5;
        side = 1;
      }
    }
  }
  g.iterations = it;

  const auto u = detail::unit_bubble(q);
  const double scale = std::cbrt(big / u.volume_large);
  const double scale2 = scale * scale;
  BubbleFrame f = u.frame;
  f.rL *= scale;
  f.zL *= scale;
  f.rS *= scale;
  f.zS *= scale;
  f.a *= scale;
  f.k0 /= scale;
  g.frame = f;
  g.junction_radius = f.a;

  const double rL = f.rL, rS = f.rS;
  const double thetaL = std::acos(std::clamp(-f.zL / rL, -1.0, 1.0));
  const double thetaS = std::acos(std::clamp(f.zS / rS, -1.0, 1.0));
  g.theta0 = std::asin(std::clamp(f.a * f.k0, 0.0, 1.0));
  if (g.large_phase == 1) {
    g.r1 = rL, g.r2 = rS, g.theta1 = thetaL, g.theta2 = thetaS;
    g.area1 = u.area_large * scale2, g.area2 = u.area_small * scale2;
  } else {
    g.r1 = rS, g.r2 = rL, g.theta1 = thetaS, g.theta2 = thetaL;
    g.area1 = u.area_small * scale2, g.area2 = u.area_large * scale2;
  }
  g.area0 = u.area_sep * scale2;
  if (f.k0 == 0.0)
    g.r0 = std::numeric_limits<double>::infinity();
  else
    g.r0 = (g.large_phase == 1 ? 1.0 : -1.0) / f.k0;

  if (bubble_residuals(g).max() > kBubbleResidualTol)
    throw Error(ErrorCode::ConvergenceFailure, "",
                "double bubble residual above tolerance");
  return g;
}

/// Like solve_double_bubble, but one volume may be zero (a single sphere).
inline DoubleBubbleGeometry double_bubble_geometry(double m1, double m2) {
  if (!(m1 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m1", "mass must be >= 0");
  if (!(m2 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m2", "mass must be >= 0");
  if (!(m1 + m2 > 0.0))
    throw Error(ErrorCode::NonPositiveMass, "m1+m2", "total volume must be positive");
  if (m1 == 0.0 || m2 == 0.0) return detail::degenerate_bubble(m1, m2);
  return solve_double_bubble(m1, m2);
}

/// Surface area S(m1, m2) of the standard double bubble; a sphere when one
/// volume vanishes.
inline double double_bubble_area(double m1, double m2) {
  if (!(m1 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m1", "mass must be >= 0");
  if (!(m2 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m2", "mass must be >= 0");
  if (!(m1 + m2 > 0.0))
    throw Error(ErrorCode::NonPositiveMass, "m1+m2", "total volume must be positive");
  if (m1 == 0.0 || m2 == 0.0) return sphere_area(m1 + m2);
  return solve_double_bubble(m1, m2).total_area();
}

/// (36 pi)^{1/3}/2 * (m1^{2/3} + m2^{2/3} + (m1+m2)^{2/3}).
inline double hutchings_lower_bound(double m1, double m2) {
  if (!(m1 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m1", "mass must be >= 0");
  if (!(m2 >= 0.0)) throw Error(ErrorCode::NegativeMass, "m2", "mass must be >= 0");
  return kHalfSphereAreaCoeff *
         (pow_two_thirds(m1) + pow_two_thirds(m2) + pow_two_thirds(m1 + m2));
}

/// True iff removing x of the second volume does not increase the area,
/// up to 1e-9 of slack.
inline bool check_monotonicity(double m1, double m2, double x) {
  if (!(x >= 0.0) || x > m2) return false;
  if (m1 + m2 - x <= 0.0) return true;
  return double_bubble_area(m1, m2 - x) <= double_bubble_area(m1, m2) + 1e-9;
}

}  // namespace tridrop
