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
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tridrop/constants.hpp"
#include "tridrop/error.hpp"

namespace tridrop {

/// Total masses and interaction coefficients.  The interaction matrix is
/// symmetric by construction: only gamma12 is stored.
///
/// kernel_prefactor multiplies every Coulomb integral.  The default 1 gives
/// the bare |x-y|^{-1} kernel; 1/(4 pi) gives the Green's-function
/// normalisation used for the leading-order energy.
struct ProblemParams {
  double M1 = 1.0;
  double M2 = 1.0;
  double gamma11 = 1.0;
  double gamma12 = 1.0;
  double gamma22 = 1.0;
  double kernel_prefactor = 1.0;

  double weight11() const { return gamma11 * kernel_prefactor; }
  double weight12() const { return gamma12 * kernel_prefactor; }
  double weight22() const { return gamma22 * kernel_prefactor; }

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

/// The reduced parameter set that the cluster-count bound depends on.  The
/// cross coefficient is absent on purpose: nothing built from BoundInputs
/// can see it.  Gammas here already include the kernel prefactor.
struct BoundInputs {
  double M1;
  double M2;
  double gamma11;
  double gamma22;

  static BoundInputs from(const ProblemParams& p) {
    return {p.M1, p.M2, p.weight11(), p.weight22()};
  }
};

/// Throws Error(NonPositiveMass | NegativeGamma) naming the offending field.
inline void validate_params(const ProblemParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::NonPositiveMass, name,
                  "total mass must be positive and finite");
  };
  auto nonnegative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::NegativeGamma, name,
                  "interaction coefficient must be non-negative and finite");
  };
  positive(p.M1, "M1");
  positive(p.M2, "M2");
  nonnegative(p.gamma11, "gamma11");
  nonnegative(p.gamma12, "gamma12");
  nonnegative(p.gamma22, "gamma22");
  nonnegative(p.kernel_prefactor, "kernel_prefactor");
}

struct ClusterMasses {
  double m1 = 0.0;
  double m2 = 0.0;

  double total() const { return m1 + m2; }
  bool mixed() const { return m1 > 0.0 && m2 > 0.0; }
  double of(int phase) const { return phase == 1 ? m1 : m2; }

  friend bool operator==(const ClusterMasses&, const ClusterMasses&) = default;
};

inline void validate_masses(const ClusterMasses& m) {
  if (!(m.m1 >= 0.0) || !std::isfinite(m.m1))
    throw Error(ErrorCode::NegativeMass, "m1", "cluster mass must be >= 0");
  if (!(m.m2 >= 0.0) || !std::isfinite(m.m2))
    throw Error(ErrorCode::NegativeMass, "m2", "cluster mass must be >= 0");
  if (!(m.total() > 0.0))
    throw Error(ErrorCode::NonPositiveMass, "m1+m2",
                "empty clusters are not allowed");
}

struct SingleBall {
  int phase = 1;
  friend bool operator==(const SingleBall&, const SingleBall&) = default;
};
struct StandardDoubleBubble {
  friend bool operator==(const StandardDoubleBubble&,
                         const StandardDoubleBubble&) = default;
};
/// Two disjoint balls, one per phase, treated as a single cluster.  This
/// breaks connectedness of the cluster, so energies of this shape are
/// reported as relaxed.
struct SeparatedBalls {
  double center_distance = 0.0;
  friend bool operator==(const SeparatedBalls&, const SeparatedBalls&) = default;
};

using Shape = std::variant<SingleBall, StandardDoubleBubble, SeparatedBalls>;

enum class ShapeKind { SingleBall, StandardDoubleBubble, SeparatedBalls };

inline std::string_view to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::SingleBall: return "single_ball";
    case ShapeKind::StandardDoubleBubble: return "double_bubble";
    case ShapeKind::SeparatedBalls: return "separated_balls";
  }
  return "unknown";
}

/// Smallest center distance at which the balls of volumes m1, m2 are disjoint.
inline double tangency_distance(double m1, double m2) {
  return ball_radius(m1) + ball_radius(m2);
}

/// One cluster: its phase masses plus a parametrised shape.  Instances can
/// only be obtained through the validating factories.
class ClusterAnsatz {
 public:
  static ClusterAnsatz make(ClusterMasses masses, Shape shape) {
    validate_masses(masses);
    if (const auto* ball = std::get_if<SingleBall>(&shape)) {
      if (ball->phase != 1 && ball->phase != 2)
        throw Error(ErrorCode::InvalidShape, "phase", "phase must be 1 or 2");
      const double other = ball->phase == 1 ? masses.m2 : masses.m1;
      if (other != 0.0)
        throw Error(ErrorCode::InvalidShape, ball->phase == 1 ? "m2" : "m1",
                    "a single ball carries exactly one phase");
    } else {
      if (!masses.mixed())
        throw Error(ErrorCode::InvalidShape, "m1,m2",
                    "two-phase shapes need both masses positive");
      if (const auto* sep = std::get_if<SeparatedBalls>(&shape)) {
        const double touch = tangency_distance(masses.m1, masses.m2);
        if (!std::isfinite(sep->center_distance) ||
            sep->center_distance < touch * (1.0 - 1e-12))
          throw Error(ErrorCode::OverlappingBalls, "distance",
                      "center distance below the sum of the ball radii");
      }
    }
    return ClusterAnsatz(masses, shape);
  }

  static ClusterAnsatz single_ball(int phase, double mass) {
    return make(phase == 1 ? ClusterMasses{mass, 0.0} : ClusterMasses{0.0, mass},
                SingleBall{phase});
  }
  static ClusterAnsatz double_bubble(double m1, double m2) {
    return make({m1, m2}, StandardDoubleBubble{});
  }
  static ClusterAnsatz separated_balls(double m1, double m2, double distance) {
    return make({m1, m2}, SeparatedBalls{distance});
  }

  /// Picks the natural shape for the given masses: a ball when one phase is
  /// absent, otherwise `preferred` (re-validated; separated balls are pushed
  /// out to tangency if needed).
  static ClusterAnsatz reshape(ClusterMasses masses, const Shape& preferred) {
    if (masses.m2 == 0.0) return make(masses, SingleBall{1});
    if (masses.m1 == 0.0) return make(masses, SingleBall{2});
    if (const auto* sep = std::get_if<SeparatedBalls>(&preferred)) {
      const double d = std::max(sep->center_distance,
                                tangency_distance(masses.m1, masses.m2));
      return make(masses, SeparatedBalls{d});
    }
    return make(masses, StandardDoubleBubble{});
  }

  const ClusterMasses& masses() const { return masses_; }
  const Shape& shape() const { return shape_; }
  double m1() const { return masses_.m1; }
  double m2() const { return masses_.m2; }

  ShapeKind kind() const { return static_cast<ShapeKind>(shape_.index()); }
  bool relaxed() const { return kind() == ShapeKind::SeparatedBalls; }

  /// Dilation of space by factor^{1/3}: masses multiply by `factor`.
  ClusterAnsatz dilated(double factor) const {
    ClusterMasses m{masses_.m1 * factor, masses_.m2 * factor};
    Shape s = shape_;
    if (auto* sep = std::get_if<SeparatedBalls>(&s))
      sep->center_distance *= std::cbrt(factor);
    return make(m, s);
  }

  friend bool operator==(const ClusterAnsatz&, const ClusterAnsatz&) = default;

 private:
  ClusterAnsatz(ClusterMasses m, Shape s) : masses_(m), shape_(s) {}

  ClusterMasses masses_;
  Shape shape_;
};

inline bool masses_agree(double value, double expected) {
  return std::abs(value - expected) <= kMassRelTol * std::abs(expected);
}

/// A finite list of clusters whose phase masses add up to the problem's
/// totals.  Cluster positions are not stored: clusters do not interact.
class Configuration {
 public:
  static Configuration make(std::vector<ClusterAnsatz> clusters,
                            ProblemParams params) {
    validate_params(params);
    double s1 = 0.0, s2 = 0.0;
    for (const auto& c : clusters) {
      s1 += c.m1();
      s2 += c.m2();
    }
    if (!masses_agree(s1, params.M1))
      throw Error(ErrorCode::MassMismatch, "M1",
                  "cluster phase-1 masses sum to " + std::to_string(s1));
    if (!masses_agree(s2, params.M2))
      throw Error(ErrorCode::MassMismatch, "M2",
                  "cluster phase-2 masses sum to " + std::to_string(s2));
    return Configuration(std::move(clusters), params);
  }

  const std::vector<ClusterAnsatz>& clusters() const { return clusters_; }
  const ClusterAnsatz& operator[](std::size_t k) const { return clusters_.at(k); }
  std::size_t size() const { return clusters_.size(); }
  const ProblemParams& params() const { return params_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  Configuration(std::vector<ClusterAnsatz> c, ProblemParams p)
      : clusters_(std::move(c)), params_(p) {}

  std::vector<ClusterAnsatz> clusters_;
  ProblemParams params_;
};

/// Sums of phase masses over a cluster list.
inline std::pair<double, double> total_masses(
    const std::vector<ClusterAnsatz>& clusters) {
  double s1 = 0.0, s2 = 0.0;
  for (const auto& c : clusters) {
    s1 += c.m1();
    s2 += c.m2();
  }
  return {s1, s2};
}

inline std::pair<double, double> total_masses(const Configuration& c) {
  return total_masses(c.clusters());
}

/// Moves (d1, d2) of phase masses from cluster `from` to cluster `to`.
/// Clusters emptied by the move are removed; the others are reshaped to the
/// natural ansatz for their new masses.
inline Configuration apply_mass_transfer(const Configuration& c,
                                         std::size_t from, std::size_t to,
                                         double d1, double d2) {
  if (from >= c.size())
    throw Error(ErrorCode::IndexOutOfRange, "from", "no such cluster");
  if (to >= c.size())
    throw Error(ErrorCode::IndexOutOfRange, "to", "no such cluster");
  if (from == to)
    throw Error(ErrorCode::PreconditionViolated, "to",
                "source and target must differ");
  const ClusterAnsatz& src = c[from];
  if (!(d1 >= 0.0) || d1 > src.m1())
    throw Error(ErrorCode::InsufficientMass, "d1",
                "phase-1 transfer exceeds the source mass");
  if (!(d2 >= 0.0) || d2 > src.m2())
    throw Error(ErrorCode::InsufficientMass, "d2",
                "phase-2 transfer exceeds the source mass");
  if (d1 == 0.0 && d2 == 0.0) return c;

  std::vector<ClusterAnsatz> out;
  out.reserve(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const ClusterAnsatz& cl = c[k];
    if (k == from) {
      ClusterMasses left{cl.m1() - d1, cl.m2() - d2};
      if (left.m1 == 0.0 && left.m2 == 0.0) continue;
      out.push_back(ClusterAnsatz::reshape(left, cl.shape()));
    } else if (k == to) {
      out.push_back(
          ClusterAnsatz::reshape({cl.m1() + d1, cl.m2() + d2}, cl.shape()));
    } else {
      out.push_back(cl);
    }
  }
  return Configuration::make(std::move(out), c.params());
}

}  // namespace tridrop
