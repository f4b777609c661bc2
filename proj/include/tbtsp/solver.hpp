#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbtsp/cost_tensor.hpp"
#include "tbtsp/model.hpp"

namespace tbtsp {

/// Closed tour rooted at waypoint 1. configs[k] is the configuration used to
/// both enter and leave order[k].
struct TourSolution {
  std::vector<int> order;
  std::vector<Configuration> configs;
  double total_time{0.0};
  bool optimal{false};
  double gap{0.0};
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactOptions {
  /// Maximum number of scalar relaxations (one cost addition and comparison).
  std::uint64_t budget{2'000'000'000ULL};
  /// Cap on DP table entries, 2^(n-1) * (n-1) * h * s per table.
  std::uint64_t max_states{60'000'000ULL};
  unsigned threads{1};
  /// Seed for the heuristic tour that provides the pruning bound.
  std::uint64_t seed{1};
};

struct ExactStats {
  std::uint64_t relaxations{0};
  std::uint64_t roots_skipped{0};
};

/// Generalized Held-Karp dynamic program over (visited set, last waypoint,
/// last configuration), one pass per configuration of waypoint 1. States are
/// pruned against a heuristic tour with a root-relaxed completion bound, which
/// never discards an optimal tour. Throws CapacityError past the budget.
TourSolution solve_exact(const CostTensor& tensor, const ExactOptions& options = {},
                         ExactStats* stats = nullptr);

struct HeuristicOptions {
  int restarts{8};
};

/// Nearest-neighbour construction, then 2-opt over the waypoint order with
/// configurations re-optimized for every accepted order.
TourSolution solve_heuristic(const CostTensor& tensor, std::uint64_t seed,
                             const HeuristicOptions& options = {});

/// Optimal configurations for a fixed cyclic order. Rotates the result so it
/// starts at waypoint 1.
TourSolution reoptimize_configs(const CostTensor& tensor, std::span<const int> order);

/// Sum of tensor costs around the tour.
double tour_cost(const CostTensor& tensor, const TourSolution& sol);

/// Lower bound: sum over waypoints of the cheapest arc entering each.
double entry_lower_bound(const CostTensor& tensor);

}  // namespace tbtsp
