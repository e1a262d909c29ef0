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
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "tridrop/bounds.hpp"
#include "tridrop/bubble_geometry.hpp"
#include "tridrop/competitors.hpp"
#include "tridrop/core_model.hpp"
#include "tridrop/coulomb.hpp"
#include "tridrop/energy.hpp"

namespace tridrop {

/// Best ansatz energy for one cluster of masses (m1, m2).  Shapes are an
/// upward relaxation of the true infimum: e0 here is never below it.
struct E0Value {
  double energy = 0.0;
  ShapeKind shape = ShapeKind::SingleBall;
  double distance = 0.0;  ///< center distance when shape is SeparatedBalls
  double std_error = 0.0;
};

/// Upper end of the center-distance search for separated balls.
inline double separation_cap(double m1, double m2) { return 20.0 * tangency_distance(m1, m2); }

namespace detail {

/// Golden-section minimisation of a unimodal f on [lo, hi].
template <class F>
double golden_section_min(const F& f, double lo, double hi, double rel_tol = 1e-10) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > rel_tol * hi) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a), fd = f(d);
    }
  }
  // The ends are candidates too: the separated-ball energy is monotone.
  double x = fc <= fd ? c : d;
  if (f(hi) <= f(x)) x = hi;
  if (f(lo) < f(x)) x = lo;
  return x;
}

}  // namespace detail

/// Separated-ball energy with the center distance optimised over
/// [tangency, 20 (R1 + R2)].
inline E0Value best_separated(double m1, double m2, const ProblemParams& p) {
  auto energy = [&](double d) {
    return ball_energy(m1, p.weight11()) + ball_energy(m2, p.weight22()) +
           2.0 * p.weight12() * m1 * m2 / d;
  };
  const double lo = tangency_distance(m1, m2);
  const double d = detail::golden_section_min(energy, lo, separation_cap(m1, m2));
  return {energy(d), ShapeKind::SeparatedBalls, d, 0.0};
}

/// Upper envelope for e0: two balls at the largest admissible separation.
/// With gamma12 = 0 this is exactly two isolated balls.
inline double separated_envelope(double m1, double m2, const ProblemParams& p) {
  double e = ball_energy(m1, p.weight11()) + ball_energy(m2, p.weight22());
  if (m1 > 0.0 && m2 > 0.0) e += 2.0 * p.weight12() * m1 * m2 / separation_cap(m1, m2);
  return e;
}

/// e0 over the ansatz family, with double-bubble interactions evaluated by
/// the given quadrature.
inline E0Value e0_approx(double m1, double m2, const ProblemParams& p, const QuadratureSpec& spec) {
  validate_masses({m1, m2});
  if (m2 == 0.0) return {ball_energy(m1, p.weight11()), ShapeKind::SingleBall, 0.0, 0.0};
  if (m1 == 0.0) return {ball_energy(m2, p.weight22()), ShapeKind::SingleBall, 0.0, 0.0};
  const E0Value sep = best_separated(m1, m2, p);
  const EnergyBreakdown db = cluster_energy(ClusterAnsatz::double_bubble(m1, m2), p, spec);
  if (db.total <= sep.energy)
    return {db.total, ShapeKind::StandardDoubleBubble, 0.0, db.std_error};
  return sep;
}

/// Tabulated e0 for fast repeated evaluation.
///
/// Double-bubble interactions are homogeneous of degree 5/3 in the masses,
/// so they are tabulated once as functions of the composition
/// u = m2 / (m1 + m2) and interpolated linearly.  The tabulated quantities
/// are the scale-free shape factors C11 / m1^{5/3}, C22 / m2^{5/3} and
/// C12 s^{1/3} / (m1 m2) with s = m1 + m2, measured at s = 1; they stay
/// bounded as u -> 0 or 1.  Areas are solved exactly on every call.
class E0Model {
 public:
  struct Options {
    int nodes = 33;                       ///< composition nodes in [0, 1]
    std::uint64_t max_samples = 200'000;  ///< per node and phase pair
  };

  E0Model(const ProblemParams& p, const QuadratureSpec& spec) : E0Model(p, spec, Options{}) {}

  E0Model(const ProblemParams& p, const QuadratureSpec& spec, Options opt) : params_(p) {
    validate_params(p);
    validate_spec(spec);
    if (opt.nodes < 3) throw Error(ErrorCode::InvalidSpec, "nodes", "need at least 3 nodes");
    const int n = opt.nodes;
    f11_.assign(n, kBallSelfEnergyCoeff);
    f22_.assign(n, kBallSelfEnergyCoeff);
    f12_.assign(n, 0.0);
    se_.assign(n, 0.0);
    const bool need = p.weight11() > 0.0 || p.weight22() > 0.0 || p.weight12() > 0.0;
    if (!need) return;
    if (spec.method == QuadratureMethod::analytic)
      throw Error(ErrorCode::InvalidSpec, "method",
                  "double bubble interactions need monte_carlo or voxel");

    QuadratureSpec s = spec;
    s.samples = std::min(spec.samples, std::max(opt.max_samples, kMinMonteCarloSamples));
    // Interior nodes with u <= 1/2; the rest follows by exchanging phases.
    for (int k = 1; 2 * k <= n - 1; ++k) {
      const double u = static_cast<double>(k) / (n - 1);
      const double m1 = 1.0 - u, m2 = u;
      const DoubleBubbleGeometry g = solve_double_bubble(m1, m2);
      const CoulombValue c11 = bubble_coulomb(g, 1, 1, s);
      const CoulombValue c22 = bubble_coulomb(g, 2, 2, s);
      const CoulombValue c12 = bubble_coulomb(g, 1, 2, s);
      const double a11 = c11.value / pow_five_thirds(m1);
      const double a22 = c22.value / pow_five_thirds(m2);
      const double a12 = c12.value / (m1 * m2);
      const double err = std::max({c11.std_error / c11.value, c22.std_error / c22.value,
                                   c12.std_error / c12.value});
      const int mirror = n - 1 - k;
      if (mirror == k) {
        f11_[k] = f22_[k] = 0.5 * (a11 + a22);
        f12_[k] = a12;
        se_[k] = err;
      } else {
        f11_[k] = a11, f22_[k] = a22, f12_[k] = a12, se_[k] = err;
        f11_[mirror] = a22, f22_[mirror] = a11, f12_[mirror] = a12, se_[mirror] = err;
      }
    }
    // Pure ends: the majority lobe is a ball; the minority factors are
    // continued from the neighbouring node.
    f22_[0] = f22_[1];
    f12_[0] = f12_[1];
    f11_[n - 1] = f11_[n - 2];
    f12_[n - 1] = f12_[n - 2];
  }

  const ProblemParams& params() const { return params_; }

  /// Largest relative standard error among tabulated shape factors.
  double table_relative_error() const { return *std::max_element(se_.begin(), se_.end()); }

  E0Value operator()(double m1, double m2) const {
    const ProblemParams& p = params_;
    if (m2 == 0.0) return {ball_energy(m1, p.weight11()), ShapeKind::SingleBall, 0.0, 0.0};
    if (m1 == 0.0) return {ball_energy(m2, p.weight22()), ShapeKind::SingleBall, 0.0, 0.0};
    const E0Value sep = best_separated(m1, m2, p);
    const double db = double_bubble_energy(m1, m2);
    if (db <= sep.energy) return {db, ShapeKind::StandardDoubleBubble, 0.0, 0.0};
    return sep;
  }

  /// Tabulated energy of the standard double bubble (m1, m2), both positive.
  double double_bubble_energy(double m1, double m2) const {
    const double s = m1 + m2;
    const double u = m2 / s;
    const double x = u * static_cast<double>(f11_.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), f11_.size() - 2);
    const double t = x - static_cast<double>(i);
    auto lerp = [&](const std::vector<double>& f) { return (1.0 - t) * f[i] + t * f[i + 1]; };
    const ProblemParams& p = params_;
    const double coulomb = p.weight11() * lerp(f11_) * pow_five_thirds(m1) +
                           p.weight22() * lerp(f22_) * pow_five_thirds(m2) +
                           2.0 * p.weight12() * lerp(f12_) * m1 * m2 / std::cbrt(s);
    const double area = std::min(m1, m2) < 1e-12 * std::max(m1, m2)
                            ? sphere_area(s)
                            : solve_double_bubble(m1, m2).total_area();
    return area + coulomb;
  }

 private:
  ProblemParams params_;
  std::vector<double> f11_, f22_, f12_, se_;
};

/// Realises a cluster of masses (m1, m2) as the winning ansatz of `e0`.
template <class E0>
ClusterAnsatz realize_cluster(const E0& e0, double m1, double m2) {
  if (m2 == 0.0) return ClusterAnsatz::single_ball(1, m1);
  if (m1 == 0.0) return ClusterAnsatz::single_ball(2, m2);
  const E0Value v = e0(m1, m2);
  if (v.shape == ShapeKind::SeparatedBalls) return ClusterAnsatz::separated_balls(m1, m2, v.distance);
  return ClusterAnsatz::double_bubble(m1, m2);
}

struct AnnealOptions {
  int proposals_per_temperature = 100;
  double cooling = 0.95;
  double initial_temperature_fraction = 0.1;  ///< of the two-ball energy
  double transfer_fraction = 0.2;             ///< max share of a phase moved at once
  std::size_t max_clusters = 64;              ///< practical cap below K
};

inline constexpr std::uint64_t kDefaultBudget = 50'000;

struct PartitionResult {
  Configuration configuration;
  double energy = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  std::size_t cluster_cap = 0;
  /// Best energy after each temperature level; non-increasing.
  std::vector<double> best_history;
};

namespace detail {

using State = std::vector<ClusterMasses>;

class Annealer {
 public:
  Annealer(const E0Model& model, std::size_t cap, const AnnealOptions& opt)
      : model_(model), cap_(cap), opt_(opt) {}

  double cost(const ClusterMasses& m) const { return model_(m.m1, m.m2).energy; }
  double cost(const State& s) const {
    double e = 0.0;
    for (const auto& m : s) e += cost(m);
    return e;
  }

  /// Proposes a neighbour; returns false when the move is not applicable.
  bool propose(const State& s, State& out, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    auto open = [&] {  // in (0, 1)
      double f;
      do f = unit(rng); while (f <= 0.0);
      return f;
    };
    out = s;
    const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    switch (kind) {
      case 0: {  // split
        if (s.size() >= cap_) return false;
        const std::size_t k = pick(s.size());
        const ClusterMasses m = s[k];
        ClusterMasses a, b;
        if (m.mixed() && unit(rng) < 1.0 / 3.0) {
          a = {m.m1, 0.0}, b = {0.0, m.m2};
        } else {
          const double f1 = open(), f2 = open();
          a = {f1 * m.m1, f2 * m.m2};
          b = {m.m1 - a.m1, m.m2 - a.m2};
        }
        if (a.total() <= 0.0 || b.total() <= 0.0) return false;
        out[k] = a;
        out.push_back(b);
        return true;
      }
      case 1: {  // merge
        if (s.size() < 2) return false;
        const std::size_t i = pick(s.size());
        std::size_t j = pick(s.size() - 1);
        if (j >= i) ++j;
        out[i] = {s[i].m1 + s[j].m1, s[i].m2 + s[j].m2};
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
        return true;
      }
      case 2: {  // transfer delta of one phase
        if (s.size() < 2) return false;
        const std::size_t i = pick(s.size());
        std::size_t j = pick(s.size() - 1);
        if (j >= i) ++j;
        const int phase = unit(rng) < 0.5 ? 1 : 2;
        const double avail = s[i].of(phase);
        if (avail <= 0.0) return false;
        const double delta = opt_.transfer_fraction * avail * (1.0 - unit(rng));  // (0, 0.2 m]
        (phase == 1 ? out[i].m1 : out[i].m2) -= delta;
        (phase == 1 ? out[j].m1 : out[j].m2) += delta;
        return out[i].total() > 0.0;
      }
      default: {  // rebalance two clusters to a common composition
        if (s.size() < 2) return false;
        const std::size_t i = pick(s.size());
        std::size_t j = pick(s.size() - 1);
        if (j >= i) ++j;
        const double t1 = s[i].m1 + s[j].m1, t2 = s[i].m2 + s[j].m2;
        const double f = open();
        out[i] = {f * t1, f * t2};
        out[j] = {t1 - out[i].m1, t2 - out[i].m2};
        return out[i].total() > 0.0 && out[j].total() > 0.0;
      }
    }
  }

  /// Greedy merges, phase separations and whole-phase transfers until no
  /// single such move lowers the energy.
  void descend(State& s, double& e) const {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < s.size() && !improved; ++i)
        for (std::size_t j = i + 1; j < s.size() && !improved; ++j) {
          const ClusterMasses merged{s[i].m1 + s[j].m1, s[i].m2 + s[j].m2};
          const double d = cost(merged) - cost(s[i]) - cost(s[j]);
          if (d < -1e-14 * std::abs(e)) {
            s[i] = merged;
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(j));
            e += d, improved = true;
          }
        }
      for (std::size_t i = 0; i < s.size() && !improved; ++i) {
        if (!s[i].mixed() || s.size() >= cap_) continue;
        const ClusterMasses a{s[i].m1, 0.0}, b{0.0, s[i].m2};
        const double d = cost(a) + cost(b) - cost(s[i]);
        if (d < -1e-14 * std::abs(e)) {
          s[i] = a;
          s.push_back(b);
          e += d, improved = true;
        }
      }
      for (std::size_t i = 0; i < s.size() && !improved; ++i)
        for (std::size_t j = 0; j < s.size() && !improved; ++j)
          for (int phase = 1; phase <= 2 && !improved; ++phase) {
            if (i == j || s[i].of(phase) == 0.0) continue;
            ClusterMasses a = s[i], b = s[j];
            (phase == 1 ? b.m1 : b.m2) += a.of(phase);
            (phase == 1 ? a.m1 : a.m2) = 0.0;
            if (a.total() <= 0.0) continue;
            const double d = cost(a) + cost(b) - cost(s[i]) - cost(s[j]);
            if (d < -1e-14 * std::abs(e)) {
              s[i] = a, s[j] = b;
              e += d, improved = true;
            }
          }
    }
  }

 private:
  const E0Model& model_;
  std::size_t cap_;
  AnnealOptions opt_;
};

/// Closes the rounding gap between the state's totals and (M1, M2) on the
/// cluster carrying the most of each phase.
inline void restore_totals(State& s, const ProblemParams& p) {
  for (int phase = 1; phase <= 2; ++phase) {
    double sum = 0.0;
    std::size_t big = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      sum += s[k].of(phase);
      if (s[k].of(phase) > s[big].of(phase)) big = k;
    }
    const double gap = (phase == 1 ? p.M1 : p.M2) - sum;
    (phase == 1 ? s[big].m1 : s[big].m2) += gap;
  }
}

inline Configuration realize_state(const E0Model& model, const State& s) {
  std::vector<ClusterAnsatz> clusters;
  clusters.reserve(s.size());
  for (const auto& m : s) clusters.push_back(realize_cluster(model, m.m1, m.m2));
  return Configuration::make(std::move(clusters), model.params());
}

}  // namespace detail

/// Simulated annealing over cluster partitions scored by the tabulated e0,
/// followed by greedy descent and a competitor self-check.  Starts from one
/// ball per phase, so the result never exceeds the two-ball energy.
/// Deterministic for a given seed.
inline PartitionResult minimize_E0(const E0Model& model, std::uint64_t budget, std::uint64_t seed,
                                   const AnnealOptions& opt = {}) {
  const ProblemParams& p = model.params();
  if (budget < 1) throw Error(ErrorCode::InvalidSpec, "budget", "budget must be >= 1");
  const double K = cluster_count_bound(p).K;
  const std::size_t cap =
      K < static_cast<double>(opt.max_clusters) ? static_cast<std::size_t>(K) : opt.max_clusters;
  detail::Annealer ann(model, std::max<std::size_t>(cap, 2), opt);

  detail::State state{{p.M1, 0.0}, {0.0, p.M2}};
  double energy = ann.cost(state);
  detail::State best = state;
  double best_energy = energy;
  std::vector<double> history;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double temperature = opt.initial_temperature_fraction * two_ball_upper_bound(p);
  detail::State candidate;
  std::uint64_t it = 0;
  while (it < budget) {
    for (int n = 0; n < opt.proposals_per_temperature && it < budget; ++n, ++it) {
      if (!ann.propose(state, candidate, rng)) continue;
      const double e = ann.cost(candidate);
      const double delta = e - energy;
      if (delta <= 0.0 || unit(rng) < std::exp(-delta / temperature)) {
        state.swap(candidate);
        energy = e;
        if (energy < best_energy) best = state, best_energy = energy;
      }
    }
    history.push_back(best_energy);
    temperature *= opt.cooling;
  }

  ann.descend(best, best_energy);

  // Competitor self-check: apply any move that certifies non-optimality.
  for (bool again = true; again;) {
    again = false;
    detail::restore_totals(best, p);
    const Configuration c = detail::realize_state(model, best);
    for (std::size_t k = 0; k < c.size() && !again; ++k) {
      if (!c[k].masses().mixed()) continue;
      try {
        const CompetitorMove mv = dispatch_move(c, k);
        if (!mv.improving()) continue;
        detail::State next;
        for (const auto& cl : mv.result.clusters()) next.push_back(cl.masses());
        const double e = ann.cost(next);
        if (e < best_energy) best = std::move(next), best_energy = e, again = true;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::PreconditionViolated) throw;
      }
    }
  }
  history.push_back(best_energy);

  detail::restore_totals(best, p);
  Configuration config = detail::realize_state(model, best);
  return {std::move(config), ann.cost(best), budget, seed, cap, std::move(history)};
}

inline PartitionResult minimize_E0(const ProblemParams& p, std::uint64_t budget, std::uint64_t seed,
                                   const QuadratureSpec& spec = {}) {
  const E0Model model(p, spec);
  return minimize_E0(model, budget, seed);
}

/// Independent chains, one per seed, run in parallel.  The lowest energy
/// wins; ties go to the lowest seed.
inline PartitionResult minimize_E0_multi(const E0Model& model, std::uint64_t budget,
                                         std::span<const std::uint64_t> seeds,
                                         const AnnealOptions& opt = {}) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidSpec, "seeds", "need at least one seed");
  std::vector<std::optional<PartitionResult>> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < seeds.size(); ++i)
      pool.emplace_back([&, i] {
        try {
          results[i].emplace(minimize_E0(model, budget, seeds[i], opt));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const auto& a = *results[i];
    const auto& b = *results[best];
    if (a.energy < b.energy || (a.energy == b.energy && a.seed < b.seed)) best = i;
  }
  return std::move(*results[best]);
}

/// e0 tabulated on a lattice, with bilinear interpolation between nodes.
/// Interpolation is exact at nodes; between them the error shrinks with
/// refinement (e0 is smooth away from the pure axes).
struct E0Surface {
  std::vector<double> m1_grid;
  std::vector<double> m2_grid;
  std::vector<double> values;       ///< row-major, index i * m2_grid.size() + j
  std::vector<ShapeKind> winners;   ///< shape per node

  double at(std::size_t i, std::size_t j) const { return values[i * m2_grid.size() + j]; }
  ShapeKind winner(std::size_t i, std::size_t j) const { return winners[i * m2_grid.size() + j]; }

  double interpolate(double m1, double m2) const {
    auto locate = [](const std::vector<double>& g, double x, std::size_t& i, double& t) {
      if (g.size() == 1) return i = 0, t = 0.0, void();
      auto it = std::upper_bound(g.begin(), g.end(), x);
      i = std::clamp<std::size_t>(static_cast<std::size_t>(it - g.begin()), 1, g.size() - 1) - 1;
      t = std::clamp((x - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
    };
    std::size_t i, j;
    double s, t;
    locate(m1_grid, m1, i, s);
    locate(m2_grid, m2, j, t);
    const std::size_t i1 = std::min(i + 1, m1_grid.size() - 1);
    const std::size_t j1 = std::min(j + 1, m2_grid.size() - 1);
    return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i1, j) + (1 - s) * t * at(i, j1) +
           s * t * at(i1, j1);
  }
};

/// Tabulates `e0` (any callable (m1, m2) -> E0Value) on the lattice
/// m1_grid x m2_grid.  Grids must be non-empty and strictly increasing; the
/// node (0, 0) gets energy 0.
template <class E0>
E0Surface build_e0_surface(const E0& e0, std::vector<double> m1_grid, std::vector<double> m2_grid) {
  auto check = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) throw Error(ErrorCode::InvalidSpec, name, "grid must be non-empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] >= 0.0)) throw Error(ErrorCode::NegativeMass, name, "grid masses must be >= 0");
      if (i > 0 && !(g[i] > g[i - 1]))
        throw Error(ErrorCode::InvalidSpec, name, "grid must be strictly increasing");
    }
  };
  check(m1_grid, "m1_grid");
  check(m2_grid, "m2_grid");
  E0Surface s{std::move(m1_grid), std::move(m2_grid), {}, {}};
  for (double m1 : s.m1_grid)
    for (double m2 : s.m2_grid) {
      if (m1 + m2 == 0.0) {
        s.values.push_back(0.0);
        s.winners.push_back(ShapeKind::SingleBall);
        continue;
      }
      const E0Value v = e0(m1, m2);
      s.values.push_back(v.energy);
      s.winners.push_back(v.shape);
    }
  return s;
}

}  // namespace tridrop
