#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "tbtsp/solver.hpp"

namespace tbtsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Configuration make_config(const CostTensor& tensor, int waypoint, std::size_t c) {
  const int s = static_cast<int>(tensor.s());
  return {waypoint, static_cast<int>(c) / s, static_cast<int>(c) % s};
}

std::size_t config_index(const CostTensor& tensor, const Configuration& cfg) {
  return static_cast<std::size_t>(cfg.heading_idx) * tensor.s() +
         static_cast<std::size_t>(cfg.speed_idx);
}

// Cheapest closing of the fixed cyclic `order` when order[0] uses config
// `root`; fills `choice` with the per-position configurations.
double chain_with_root(const CostTensor& tensor, std::span<const int> order, std::size_t root,
                       std::vector<std::size_t>* choice) {
  const std::size_t configs = tensor.configs();
  const std::size_t n = order.size();
  std::vector<double> dist(configs);
  std::vector<double> next(configs);
  std::vector<std::size_t> parent;
  if (choice) parent.assign(n * configs, 0);

  const auto first = static_cast<std::size_t>(order[0] - 1);
  const auto second = static_cast<std::size_t>(order[1] - 1);
  const auto start = tensor.row(first, root, second);
  std::copy(start.begin(), start.end(), dist.begin());
  for (std::size_t pos = 2; pos < n; ++pos) {
    const auto from = static_cast<std::size_t>(order[pos - 1] - 1);
    const auto to = static_cast<std::size_t>(order[pos] - 1);
    std::fill(next.begin(), next.end(), kInf);
    for (std::size_t cf = 0; cf < configs; ++cf) {
      const double base = dist[cf];
      if (base == kInf) continue;
      const auto row = tensor.row(from, cf, to);
      for (std::size_t ct = 0; ct < configs; ++ct) {
        const double value = base + row[ct];
        if (value < next[ct]) {
          next[ct] = value;
          if (choice) parent[pos * configs + ct] = cf;
        }
      }
    }
    dist.swap(next);
  }
  const auto last = static_cast<std::size_t>(order[n - 1] - 1);
  double best = kInf;
  std::size_t best_c = 0;
  for (std::size_t c = 0; c < configs; ++c) {
    const double value = dist[c] + tensor.at(last, c, first, root);
    if (value < best) {
      best = value;
      best_c = c;
    }
  }
  if (choice) {
    choice->assign(n, 0);
    (*choice)[0] = root;
    std::size_t c = best_c;
    for (std::size_t pos = n - 1; pos >= 1; --pos) {
      (*choice)[pos] = c;
      if (pos >= 2) c = parent[pos * configs + c];
    }
  }
  return best;
}

void check_order(const CostTensor& tensor, std::span<const int> order) {
  const std::size_t n = tensor.n();
  if (order.size() != n) throw std::invalid_argument("order must list every waypoint once");
  std::vector<bool> seen(n + 1, false);
  for (int id : order) {
    if (id < 1 || static_cast<std::size_t>(id) > n || seen[static_cast<std::size_t>(id)]) {
      throw std::invalid_argument("order is not a permutation of the waypoint ids");
    }
    seen[static_cast<std::size_t>(id)] = true;
  }
}

TourSolution nearest_neighbour(const CostTensor& tensor) {
  const std::size_t n = tensor.n();
  const std::size_t configs = tensor.configs();
  TourSolution best;
  best.total_time = kInf;
  for (std::size_t root = 0; root < configs; ++root) {
    std::vector<bool> visited(n, false);
    visited[0] = true;
    std::vector<int> order = {1};
    std::size_t at = 0;
    std::size_t cfg = root;
    for (std::size_t step = 1; step < n; ++step) {
      double best_cost = kInf;
      std::size_t best_j = 0;
      std::size_t best_c = 0;
      for (std::size_t j = 1; j < n; ++j) {
        if (visited[j]) continue;
        const auto row = tensor.row(at, cfg, j);
        for (std::size_t c = 0; c < configs; ++c) {
          if (row[c] < best_cost) {
            best_cost = row[c];
            best_j = j;
            best_c = c;
          }
        }
      }
      visited[best_j] = true;
      order.push_back(static_cast<int>(best_j) + 1);
      at = best_j;
      cfg = best_c;
    }
    TourSolution candidate = reoptimize_configs(tensor, order);
    if (candidate.total_time < best.total_time) best = std::move(candidate);
  }
  return best;
}

// First-improvement 2-opt over positions 1..n-1 (waypoint 1 stays first).
// Moves are screened with the current root configuration held fixed.
TourSolution two_opt(const CostTensor& tensor, TourSolution tour) {
  const std::size_t n = tour.order.size();
  bool improved = true;
  while (improved) {
    improved = false;
    const std::size_t root = config_index(tensor, tour.configs[0]);
    std::vector<int> candidate = tour.order;
    for (std::size_t i = 1; i + 1 < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n && !improved; ++j) {
        candidate = tour.order;
        std::reverse(candidate.begin() + static_cast<std::ptrdiff_t>(i),
                     candidate.begin() + static_cast<std::ptrdiff_t>(j) + 1);
        const double value = chain_with_root(tensor, candidate, root, nullptr);
        if (value < tour.total_time - 1e-9 * std::max(1.0, tour.total_time)) {
          tour = reoptimize_configs(tensor, candidate);
          improved = true;
        }
      }
    }
  }
  return tour;
}

// Random double-bridge kick on positions 1..n-1.
std::vector<int> double_bridge(std::vector<int> order, std::mt19937_64& rng) {
  const std::size_t n = order.size();
  if (n < 5) {
    std::shuffle(order.begin() + 1, order.end(), rng);
    return order;
  }
  std::uniform_int_distribution<std::size_t> pick(1, n - 1);
  std::vector<std::size_t> cuts = {pick(rng), pick(rng), pick(rng)};
  std::sort(cuts.begin(), cuts.end());
  const auto b = order.begin();
  std::vector<int> out(b, b + static_cast<std::ptrdiff_t>(1));
  std::vector<int> a_part(b + 1, b + static_cast<std::ptrdiff_t>(cuts[0]));
  std::vector<int> b_part(b + static_cast<std::ptrdiff_t>(cuts[0]), b + static_cast<std::ptrdiff_t>(cuts[1]));
  std::vector<int> c_part(b + static_cast<std::ptrdiff_t>(cuts[1]), b + static_cast<std::ptrdiff_t>(cuts[2]));
  std::vector<int> d_part(b + static_cast<std::ptrdiff_t>(cuts[2]), order.end());
  for (const auto* part : {&a_part, &c_part, &b_part, &d_part}) {
    out.insert(out.end(), part->begin(), part->end());
  }
  return out;
}

}  // namespace

TourSolution reoptimize_configs(const CostTensor& tensor, std::span<const int> order) {
  check_order(tensor, order);
  const std::size_t n = order.size();
  const std::size_t configs = tensor.configs();

  // Rotate so waypoint 1 leads; the cycle value is rotation invariant.
  std::vector<int> rotated(order.begin(), order.end());
  std::rotate(rotated.begin(), std::find(rotated.begin(), rotated.end(), 1), rotated.end());

  double best = kInf;
  std::size_t best_root = 0;
  for (std::size_t root = 0; root < configs; ++root) {
    const double value = chain_with_root(tensor, rotated, root, nullptr);
    if (value < best) {
      best = value;
      best_root = root;
    }
  }
  std::vector<std::size_t> choice;
  chain_with_root(tensor, rotated, best_root, &choice);

  TourSolution sol;
  sol.order = rotated;
  for (std::size_t pos = 0; pos < n; ++pos) {
    sol.configs.push_back(make_config(tensor, rotated[pos], choice[pos]));
  }
  sol.total_time = best;
  sol.optimal = false;
  return sol;
}

double tour_cost(const CostTensor& tensor, const TourSolution& sol) {
  double total = 0.0;
  const std::size_t n = sol.order.size();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t next = (pos + 1) % n;
    total += tensor.at(static_cast<std::size_t>(sol.order[pos] - 1),
                       config_index(tensor, sol.configs[pos]),
                       static_cast<std::size_t>(sol.order[next] - 1),
                       config_index(tensor, sol.configs[next]));
  }
  return total;
}

double entry_lower_bound(const CostTensor& tensor) {
  double total = 0.0;
  for (std::size_t j = 0; j < tensor.n(); ++j) {
    double best = kInf;
    for (std::size_t i = 0; i < tensor.n(); ++i) {
      if (i == j) continue;
      for (std::size_t ci = 0; ci < tensor.configs(); ++ci) {
        const auto row = tensor.row(i, ci, j);
        best = std::min(best, *std::min_element(row.begin(), row.end()));
      }
    }
    total += best;
  }
  return total;
}

TourSolution solve_heuristic(const CostTensor& tensor, std::uint64_t seed,
                             const HeuristicOptions& options) {
  std::mt19937_64 rng(seed);
  TourSolution best = two_opt(tensor, nearest_neighbour(tensor));
  if (tensor.n() > 3) {
    for (int k = 0; k < options.restarts; ++k) {
      TourSolution candidate =
          two_opt(tensor, reoptimize_configs(tensor, double_bridge(best.order, rng)));
      if (candidate.total_time < best.total_time) best = std::move(candidate);
    }
  }
  best.optimal = false;
  const double bound = entry_lower_bound(tensor);
  best.gap = best.total_time > 0.0 ? std::max(0.0, (best.total_time - bound) / best.total_time)
                                   : 0.0;
  return best;
}

}  // namespace tbtsp
