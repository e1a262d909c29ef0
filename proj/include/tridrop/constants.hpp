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
#include <numbers>

namespace tridrop {

inline constexpr double kPi = std::numbers::pi;

/// (36 pi)^{1/3}: area of the sphere enclosing unit volume.
inline const double kSphereAreaCoeff = std::cbrt(36.0 * kPi);

/// Coefficient in the Hutchings-type lower bound, half the sphere coefficient.
inline const double kHalfSphereAreaCoeff = 0.5 * kSphereAreaCoeff;

/// Coulomb self-energy of the unit-volume ball, (32 pi^2 / 15) R^5 with
/// R = (3 / 4 pi)^{1/3}.  Cross-checked against a 10^7-pair Monte-Carlo
/// estimate in the test suite.
inline const double kBallSelfEnergyCoeff =
    32.0 * kPi * kPi / 15.0 * std::pow(3.0 / (4.0 * kPi), 5.0 / 3.0);

/// Self-interaction of the unit cube under |x-y|^{-1}:
///   2 [ (1 + sqrt2 - 2 sqrt3) / 5 - pi/3 + ln((1 + sqrt2)(2 + sqrt3)) ].
/// A 10^8-pair Monte-Carlo run gave 1.88238 +- 0.00014.
inline constexpr double kCubeSelfEnergyCoeff = 1.8823126443896605;

/// Relative tolerance for mass bookkeeping.
inline constexpr double kMassRelTol = 1e-12;

/// m^{2/3} without calling pow.
inline double pow_two_thirds(double m) {
  const double c = std::cbrt(m);
  return c * c;
}

/// m^{5/3} without calling pow.
inline double pow_five_thirds(double m) { return m * pow_two_thirds(m); }

/// Radius of the ball of volume m.
inline double ball_radius(double m) { return std::cbrt(3.0 * m / (4.0 * kPi)); }

}  // namespace tridrop
