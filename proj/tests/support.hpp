#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tbtsp/cost_tensor.hpp"
#include "tbtsp/model.hpp"
#include "tbtsp/trajectory.hpp"

namespace tbtsp::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Duration of an accelerate/coast/accelerate profile that coasts at v_c, or
/// +inf when the coast would need negative time. Ramps use full acceleration.
inline double coast_profile_time(double d, double vs, double ve, double vc, double a) {
  const double t1 = std::abs(vc - vs) / a;
  const double t3 = std::abs(ve - vc) / a;
  const double d1 = 0.5 * (vs + vc) * t1;
  const double d3 = 0.5 * (vc + ve) * t3;
  const double rest = d - d1 - d3;
  const double scale = std::max({1.0, std::abs(d), std::abs(d1), std::abs(d3)});
  if (std::abs(rest) <= 1e-13 * scale) return t1 + t3;
  if (vc == 0.0 || rest / vc < 0.0) return kInf;
  return t1 + t3 + rest / vc;
}

/// Time-optimal bang-coast-bang duration by grid search over the coast
/// velocity, which fixes both switch times. Each round zooms into the best
/// cells of the previous grid.
inline double grid_search_duration(double d, double vs, double ve, double v_max, double a_max) {
  constexpr int kCells = 400;
  constexpr int kRounds = 10;
  struct Window {
    double lo;
    double hi;
  };
  std::vector<Window> windows = {{-v_max, v_max}};
  double best = kInf;
  for (int round = 0; round < kRounds; ++round) {
    std::vector<std::pair<double, double>> scored;
    for (const Window& w : windows) {
      const double step = (w.hi - w.lo) / kCells;
      for (int c = 0; c <= kCells; ++c) {
        const double vc = std::clamp(w.lo + c * step, -v_max, v_max);
        const double t = coast_profile_time(d, vs, ve, vc, a_max);
        best = std::min(best, t);
        if (std::isfinite(t)) scored.emplace_back(t, vc);
      }
      // The optimum can sit where the coast time reaches zero; sample the
      // ramp endpoints exactly.
      for (double vc : {vs, ve, w.lo, w.hi}) {
        vc = std::clamp(vc, -v_max, v_max);
        best = std::min(best, coast_profile_time(d, vs, ve, vc, a_max));
      }
    }
    if (scored.empty()) break;
    std::sort(scored.begin(), scored.end());
    const double width = (windows.front().hi - windows.front().lo) / kCells;
    std::vector<Window> next;
    for (std::size_t k = 0; k < std::min<std::size_t>(3, scored.size()); ++k) {
      next.push_back({scored[k].second - 2.0 * width, scored[k].second + 2.0 * width});
    }
    windows = next;
  }
  return best;
}

/// Forward integration of the sampled acceleration. Step edges are aligned
/// with the switch times so each step sees a single acceleration value;
/// returns the end position and velocity.
inline AxisState integrate_axis(const AxisTrajectory& traj, int steps_per_phase) {
  const double edges[] = {0.0, traj.t1, traj.t1 + traj.t2, traj.motion_duration(),
                          traj.duration()};
  AxisState s{traj.boundary.p_s, traj.boundary.v_s, 0.0};
  for (int phase = 0; phase < 4; ++phase) {
    const double span = edges[phase + 1] - edges[phase];
    if (span <= 0.0) continue;
    const double dt = span / steps_per_phase;
    for (int k = 0; k < steps_per_phase; ++k) {
      const double a = traj.state_at(edges[phase] + (k + 0.5) * dt).a;
      s.p += s.v * dt + 0.5 * a * dt * dt;
      s.v += a * dt;
    }
  }
  return s;
}

/// Random tensor with usable costs in [1, 10) and self-loops unusable.
inline CostTensor random_tensor(std::mt19937_64& rng, std::size_t n, std::size_t h,
                                std::size_t s, TensorKind kind = TensorKind::kTbtsp) {
  std::uniform_real_distribution<double> cost(1.0, 10.0);
  CostTensor t(kind, n, h, s);
  const std::size_t c = h * s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ci = 0; ci < c; ++ci) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t cj = 0; cj < c; ++cj) {
          t.set(i, ci, j, cj, i == j ? CostTensor::kUnusable : cost(rng));
        }
      }
    }
  }
  return t;
}

struct BruteForce {
  double total{kInf};
  std::vector<int> order;          // 1-based, starts at 1
  std::vector<std::size_t> config; // per position in `order`
};

/// Minimum cycle cost over every order rooted at waypoint 1 and every
/// configuration assignment.
inline BruteForce brute_force_tour(const CostTensor& t) {
  const std::size_t n = t.n();
  const std::size_t c = t.configs();
  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 2);
  BruteForce best;
  do {
    std::vector<int> order = {1};
    order.insert(order.end(), rest.begin(), rest.end());
    std::vector<std::size_t> cfg(n, 0);
    while (true) {
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = (k + 1) % n;
        total += t.at(order[k] - 1, cfg[k], order[next] - 1, cfg[next]);
      }
      if (total < best.total) best = {total, order, cfg};
      std::size_t pos = 0;
      while (pos < n && ++cfg[pos] == c) cfg[pos++] = 0;
      if (pos == n) break;
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

/// Minimum cycle cost over configuration assignments for one fixed order.
inline double brute_force_configs(const CostTensor& t, const std::vector<int>& order) {
  const std::size_t n = order.size();
  const std::size_t c = t.configs();
  std::vector<std::size_t> cfg(n, 0);
  double best = kInf;
  while (true) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t next = (k + 1) % n;
      total += t.at(order[k] - 1, cfg[k], order[next] - 1, cfg[next]);
    }
    best = std::min(best, total);
    std::size_t pos = 0;
    while (pos < n && ++cfg[pos] == c) cfg[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

inline Instance grid(int rows, int cols, double v_max, std::size_t headings,
                     std::vector<double> fractions, double a_max = 0.5, double spacing = 9.0) {
  const KinematicLimits limits(v_max, a_max);
  return make_grid_instance(rows, cols, spacing, limits, make_scheme(headings, fractions, limits));
}

}  // namespace tbtsp::testing
