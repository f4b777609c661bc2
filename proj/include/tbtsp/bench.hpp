#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbtsp/cost_tensor.hpp"
#include "tbtsp/model.hpp"
#include "tbtsp/solver.hpp"
#include "tbtsp/trajectory.hpp"

namespace tbtsp {

struct GridSize {
  int rows{3};
  int cols{3};
};

enum class SolverChoice { kExact, kHeuristic };

struct ExperimentConfig {
  std::vector<GridSize> grids;
  double spacing{9.0};
  std::vector<double> v_sweep;
  double a_max{0.5};
  std::vector<std::size_t> heading_counts;
  std::vector<std::vector<double>> speed_fraction_sets;
  SolverChoice solver{SolverChoice::kExact};
  std::filesystem::path output_dir;
  std::filesystem::path cache_dir;
  std::uint64_t budget{2'000'000'000ULL};
  std::uint64_t seed{1};
  unsigned workers{1};
  bool include_ddtsp{true};

  /// Throws std::invalid_argument on empty sweeps or a bad spacing.
  void validate() const;
};

struct ResultRow {
  std::string label;
  std::string grid;       // "RxC"
  std::string method;     // "TBTSP" or "DDTSP"
  double v_max{0.0};
  std::size_t headings{0};
  std::size_t speeds{0};  // 1 for DDTSP
  double objective{0.0};
  double build_time{0.0};
  double solve_time{0.0};
  bool optimal{false};
  double gap{0.0};
  std::string status;     // "ok", or "capacity" when the heuristic stood in
  TourSolution tour;
  std::shared_ptr<const Instance> instance;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  bool capacity_failure{false};
};

/// Builds and solves every (grid, |Theta|, v_max, speed set) cell. DDTSP is
/// solved once per (grid, |Theta|, v_max). Rows come out in sweep order
/// regardless of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct ImprovementRow {
  std::size_t headings{0};
  std::size_t speeds{0};
  double v_max{0.0};
  double improvement{0.0};  // percent
  std::size_t instances{0};
};

class MissingBaselineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBaselineSpeed = 1.5;

/// 100 * (DDTSP(v=1.5) - TBTSP) / DDTSP(v=1.5) per grid, averaged over grids
/// for each (|Theta|, |V|, v_max). Throws MissingBaselineError when a TBTSP
/// row has no DDTSP row at v = 1.5 with the same grid and heading count.
std::vector<ImprovementRow> improvement_stats(const std::vector<ResultRow>& rows);

/// Closed-tour trajectory through the solution, one segment per arc, sampled
/// every dt with segment end points included.
std::vector<TrajectorySample> tour_trajectory(const Instance& instance, const ResultRow& row,
                                              double dt);

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// results.csv, timings.csv, improvement.csv, and tour_<label>.json plus
/// trajectory_<label>.csv per solved row.
void emit_outputs(const std::filesystem::path& dir, const std::vector<ResultRow>& rows,
                  const std::vector<ImprovementRow>& stats, double dt = 0.1);

std::string format_grid(GridSize grid);
GridSize parse_grid(const std::string& text);

/// {"order","configs","total_time","optimal","gap"} document for a tour.
std::string tour_to_json(const TourSolution& tour);

}  // namespace tbtsp
