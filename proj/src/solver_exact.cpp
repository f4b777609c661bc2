#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tbtsp/solver.hpp"

namespace tbtsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn(k) for k in [0, count) over `threads` workers with static striping.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  const unsigned workers_count = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < workers_count; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t k = t; k < count; k += workers_count) fn(k);
    });
  }
}

// Tables over subsets of the non-root waypoints. Waypoint index p in [0, m)
// stands for tensor waypoint p + 1; entry (mask, p, c) lives at
// ((mask * m) + p) * C + c.
class SubsetDp {
 public:
  SubsetDp(const CostTensor& tensor, const ExactOptions& options, ExactStats& stats)
      : tensor_(tensor),
        options_(options),
        stats_(stats),
        m_(tensor.n() - 1),
        configs_(tensor.configs()),
        full_((std::uint32_t{1} << m_) - 1) {
    layers_.resize(m_ + 1);
    for (std::uint32_t mask = 1; mask <= full_; ++mask) {
      layers_[static_cast<std::size_t>(std::popcount(mask))].push_back(mask);
    }
  }

  std::size_t table_size() const { return (std::size_t{full_} + 1) * m_ * configs_; }

  // completion_[mask][p][c]: cheapest path from (p, c) through every waypoint
  // of `mask` (p not in mask) back to the root waypoint, arriving with any
  // configuration.
  void build_completion_bound() {
    completion_.assign(table_size(), kInf);
    for (std::size_t p = 0; p < m_; ++p) {
      for (std::size_t c = 0; c < configs_; ++c) {
        const auto back = tensor_.row(p + 1, c, 0);
        completion_[at(0, p, c)] = *std::min_element(back.begin(), back.end());
      }
    }
    charge(m_ * configs_ * configs_);
    for (std::size_t size = 1; size < m_; ++size) {
      const auto& masks = layers_[size];
      parallel_for(masks.size(), options_.threads, [&](std::size_t idx) {
        const std::uint32_t mask = masks[idx];
        for (std::size_t p = 0; p < m_; ++p) {
          if (mask >> p & 1u) continue;
          for (std::size_t c = 0; c < configs_; ++c) {
            double best = kInf;
            for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
              const std::size_t q = static_cast<std::size_t>(std::countr_zero(rest));
              const double* tail = &completion_[at(mask & ~(1u << q), q, 0)];
              const auto row = tensor_.row(p + 1, c, q + 1);
              for (std::size_t cq = 0; cq < configs_; ++cq) best = std::min(best, row[cq] + tail[cq]);
            }
            completion_[at(mask, p, c)] = best;
          }
        }
      });
      charge(masks.size() * size * (m_ - size) * configs_ * configs_);
    }
  }

  // Lower bound for tours leaving the root with configuration r.
  double root_bound(std::size_t r) const {
    double best = kInf;
    for (std::size_t p = 0; p < m_; ++p) {
      const auto row = tensor_.row(0, r, p + 1);
      const double* tail = &completion_[at(full_ & ~(1u << p), p, 0)];
      for (std::size_t c = 0; c < configs_; ++c) best = std::min(best, row[c] + tail[c]);
    }
    return best;
  }

  // Forward DP from the root in configuration r. Returns the best closed-tour
  // value and its (p, c) sequence when it does not exceed `upper_bound`.
  std::optional<double> solve_root(std::size_t r, double upper_bound,
                    std::vector<std::pair<std::size_t, std::size_t>>& tour) {
    if (forward_.empty()) {
      forward_.assign(table_size(), kInf);
      alive_.assign(std::size_t{full_} + 1, 0);
    }
    const double prune_above = upper_bound + 1e-9 * std::max(1.0, std::abs(upper_bound));

    // Singletons.
    for (std::size_t p = 0; p < m_; ++p) {
      const std::uint32_t mask = 1u << p;
      const auto row = tensor_.row(0, r, p + 1);
      const double* tail = &completion_[at(full_ & ~mask, p, 0)];
      double* out = &forward_[at(mask, p, 0)];
      bool any = false;
      for (std::size_t c = 0; c < configs_; ++c) {
        out[c] = row[c] + tail[c] > prune_above ? kInf : row[c];
        any = any || out[c] != kInf;
      }
      alive_[mask] = any ? mask : 0u;
    }
    charge(m_ * configs_);

    for (std::size_t size = 2; size <= m_; ++size) {
      const auto& masks = layers_[size];
      std::atomic<std::uint64_t> rows{0};
      parallel_for(masks.size(), options_.threads, [&](std::size_t idx) {
        const std::uint32_t mask = masks[idx];
        std::vector<double> acc(configs_);
        std::uint64_t local_rows = 0;
        std::uint32_t alive = 0;
        for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
          const std::size_t p = static_cast<std::size_t>(std::countr_zero(bits));
          const std::uint32_t src = mask & ~(1u << p);
          std::fill(acc.begin(), acc.end(), kInf);
          for (std::uint32_t pred = alive_[src]; pred != 0; pred &= pred - 1) {
            const std::size_t q = static_cast<std::size_t>(std::countr_zero(pred));
            const double* base = &forward_[at(src, q, 0)];
            for (std::size_t cq = 0; cq < configs_; ++cq) {
              const double value = base[cq];
              if (value == kInf) continue;
              const double* row = tensor_.row(q + 1, cq, p + 1).data();
              double* a = acc.data();
              for (std::size_t c = 0; c < configs_; ++c) a[c] = std::min(a[c], value + row[c]);
              ++local_rows;
            }
          }
          const double* tail = &completion_[at(full_ & ~mask, p, 0)];
          double* out = &forward_[at(mask, p, 0)];
          bool any = false;
          for (std::size_t c = 0; c < configs_; ++c) {
            out[c] = acc[c] + tail[c] > prune_above ? kInf : acc[c];
            any = any || out[c] != kInf;
          }
          if (any) alive |= 1u << p;
        }
        alive_[mask] = alive;
        rows += local_rows;
      });
      charge(rows.load() * configs_);
    }

    // Close the cycle.
    double best = kInf;
    std::size_t best_p = 0;
    std::size_t best_c = 0;
    for (std::uint32_t bits = alive_[full_]; bits != 0; bits &= bits - 1) {
      const std::size_t p = static_cast<std::size_t>(std::countr_zero(bits));
      const double* base = &forward_[at(full_, p, 0)];
      for (std::size_t c = 0; c < configs_; ++c) {
        const double value = base[c] + tensor_.at(p + 1, c, 0, r);
        if (value < best) {
          best = value;
          best_p = p;
          best_c = c;
        }
      }
    }
    charge(m_ * configs_);
    if (best > prune_above) return std::nullopt;

    tour.assign(m_, {0, 0});
    std::uint32_t mask = full_;
    std::size_t p = best_p;
    std::size_t c = best_c;
    for (std::size_t pos = m_; pos-- > 0;) {
      tour[pos] = {p, c};
      if (pos == 0) break;
      const std::uint32_t src = mask & ~(1u << p);
      const double target = forward_[at(mask, p, c)];
      bool found = false;
      for (std::uint32_t pred = alive_[src]; pred != 0 && !found; pred &= pred - 1) {
        const std::size_t q = static_cast<std::size_t>(std::countr_zero(pred));
        for (std::size_t cq = 0; cq < configs_; ++cq) {
          const double value = forward_[at(src, q, cq)];
          if (value != kInf && value + tensor_.at(q + 1, cq, p + 1, c) == target) {
            mask = src;
            p = q;
            c = cq;
            found = true;
            break;
          }
        }
      }
      if (!found) throw std::logic_error("exact solver backtracking lost the optimal path");
    }
    return best;
  }

 private:
  std::size_t at(std::uint32_t mask, std::size_t p, std::size_t c) const {
    return (static_cast<std::size_t>(mask) * m_ + p) * configs_ + c;
  }

  void charge(std::uint64_t relaxations) {
    stats_.relaxations += relaxations;
    if (stats_.relaxations > options_.budget) {
      throw CapacityError("exact solver exceeded its budget of " +
                          std::to_string(options_.budget) +
                          " relaxations; use the heuristic solver or export the MILP");
    }
  }

  const CostTensor& tensor_;
  const ExactOptions& options_;
  ExactStats& stats_;
  std::size_t m_;
  std::size_t configs_;
  std::uint32_t full_;
  std::vector<std::vector<std::uint32_t>> layers_;
  std::vector<double> completion_;
  std::vector<double> forward_;
  std::vector<std::uint32_t> alive_;
};

TourSolution two_waypoint_tour(const CostTensor& tensor) {
  const std::size_t configs = tensor.configs();
  double best = kInf;
  std::size_t best_a = 0;
  std::size_t best_b = 0;
  for (std::size_t a = 0; a < configs; ++a) {
    for (std::size_t b = 0; b < configs; ++b) {
      const double value = tensor.at(0, a, 1, b) + tensor.at(1, b, 0, a);
      if (value < best) {
        best = value;
        best_a = a;
        best_b = b;
      }
    }
  }
  const int s = static_cast<int>(tensor.s());
  TourSolution sol;
  sol.order = {1, 2};
  sol.configs = {{1, static_cast<int>(best_a) / s, static_cast<int>(best_a) % s},
                 {2, static_cast<int>(best_b) / s, static_cast<int>(best_b) % s}};
  sol.total_time = best;
  sol.optimal = true;
  return sol;
}

}  // namespace

TourSolution solve_exact(const CostTensor& tensor, const ExactOptions& options,
                         ExactStats* stats_out) {
  ExactStats local;
  ExactStats& stats = stats_out ? *stats_out : local;
  const std::size_t n = tensor.n();
  const std::size_t configs = tensor.configs();
  if (n > 31) throw CapacityError("exact solver supports at most 31 waypoints");
  if (n == 2) {
    stats.relaxations = 2 * configs * configs;
    return two_waypoint_tour(tensor);
  }

  const std::uint64_t m = n - 1;
  const std::uint64_t states = (std::uint64_t{1} << m) * m * configs;
  if (states > options.max_states) {
    throw CapacityError("exact solver needs " + std::to_string(states) +
                        " states per table, above the cap of " +
                        std::to_string(options.max_states) + "; use the heuristic solver");
  }
  const std::uint64_t bound_work = m * (m - 1) * (std::uint64_t{1} << (m - 2)) * configs * configs;
  if (bound_work > options.budget) {
    throw CapacityError("exact solver needs at least " + std::to_string(bound_work) +
                        " relaxations, above the budget of " + std::to_string(options.budget) +
                        "; use the heuristic solver or export the MILP");
  }

  const TourSolution incumbent = solve_heuristic(tensor, options.seed);
  double upper_bound = incumbent.total_time;

  SubsetDp dp(tensor, options, stats);
  dp.build_completion_bound();

  std::vector<std::pair<double, std::size_t>> roots;
  for (std::size_t r = 0; r < configs; ++r) roots.emplace_back(dp.root_bound(r), r);
  std::stable_sort(roots.begin(), roots.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  double best = kInf;
  std::size_t best_root = configs;
  std::vector<std::pair<std::size_t, std::size_t>> best_tour;
  std::vector<std::pair<std::size_t, std::size_t>> tour;
  for (const auto& [bound, r] : roots) {
    if (bound > upper_bound + 1e-9 * std::max(1.0, upper_bound)) {
      ++stats.roots_skipped;
      continue;
    }
    const auto value = dp.solve_root(r, upper_bound, tour);
    if (value && (*value < best || (*value == best && r < best_root))) {
      best = *value;
      best_root = r;
      best_tour = tour;
      upper_bound = std::min(upper_bound, best);
    }
  }

  TourSolution sol;
  if (best_root == configs) {
    // Only reachable when the pruning tolerance rejects the incumbent itself.
    sol = incumbent;
  } else {
    const int s = static_cast<int>(tensor.s());
    sol.order.push_back(1);
    sol.configs.push_back({1, static_cast<int>(best_root) / s, static_cast<int>(best_root) % s});
    for (const auto& [p, c] : best_tour) {
      const int id = static_cast<int>(p) + 2;
      sol.order.push_back(id);
      sol.configs.push_back({id, static_cast<int>(c) / s, static_cast<int>(c) % s});
    }
    sol.total_time = best;
  }
  sol.optimal = true;
  sol.gap = 0.0;
  return sol;
}

}  // namespace tbtsp
