#include "tbtsp/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "tbtsp/dubins.hpp"

namespace tbtsp {

namespace {

struct Cell {
  GridSize grid;
  std::size_t headings{0};
  double v_max{0.0};
  std::optional<std::vector<double>> fractions;  // empty for DDTSP
};

std::string format_number(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

std::string make_label(const Cell& cell) {
  std::ostringstream out;
  out << format_grid(cell.grid) << (cell.fractions ? "_tbtsp" : "_ddtsp") << "_v"
      << format_number("%g", cell.v_max) << "_h" << cell.headings;
  if (cell.fractions) out << "_s" << cell.fractions->size();
  return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ResultRow run_cell(const ExperimentConfig& cfg, const Cell& cell, unsigned solver_threads) {
  const KinematicLimits limits(cell.v_max, cfg.a_max);
  const std::vector<double> fractions = cell.fractions.value_or(std::vector<double>{1.0});
  auto instance = std::make_shared<const Instance>(make_grid_instance(
      cell.grid.rows, cell.grid.cols, cfg.spacing, limits,
      make_scheme(cell.headings, fractions, limits)));

  ResultRow row;
  row.label = make_label(cell);
  row.grid = format_grid(cell.grid);
  row.method = cell.fractions ? "TBTSP" : "DDTSP";
  row.v_max = cell.v_max;
  row.headings = cell.headings;
  row.speeds = cell.fractions ? cell.fractions->size() : 1;
  row.instance = instance;

  const auto build_start = std::chrono::steady_clock::now();
  const CostTensor tensor = load_or_build(
      *instance, cell.fractions ? TensorKind::kTbtsp : TensorKind::kDdtsp, cfg.cache_dir,
      solver_threads);
  row.build_time = seconds_since(build_start);

  const auto solve_start = std::chrono::steady_clock::now();
  row.status = "ok";
  if (cfg.solver == SolverChoice::kExact) {
    ExactOptions options;
    options.budget = cfg.budget;
    options.threads = solver_threads;
    options.seed = cfg.seed;
    try {
      row.tour = solve_exact(tensor, options);
    } catch (const CapacityError&) {
      row.tour = solve_heuristic(tensor, cfg.seed);
      row.status = "capacity";
    }
  } else {
    row.tour = solve_heuristic(tensor, cfg.seed);
  }
  row.solve_time = seconds_since(solve_start);
  row.objective = row.tour.total_time;
  row.optimal = row.tour.optimal;
  row.gap = row.tour.gap;
  return row;
}

void append_samples(std::vector<TrajectorySample>& out, std::vector<TrajectorySample> segment,
                    double offset) {
  // The first sample of a later segment repeats the previous segment's end.
  const std::size_t skip = out.empty() ? 0 : 1;
  for (std::size_t k = skip; k < segment.size(); ++k) {
    segment[k].t += offset;
    out.push_back(segment[k]);
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path.string());
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (grids.empty()) throw std::invalid_argument("at least one grid is required");
  if (v_sweep.empty()) throw std::invalid_argument("at least one v_max is required");
  if (heading_counts.empty()) throw std::invalid_argument("at least one heading count is required");
  if (speed_fraction_sets.empty()) throw std::invalid_argument("at least one speed set is required");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("spacing must be positive");
  }
  for (const auto& g : grids) {
    if (g.rows < 1 || g.cols < 1 || g.rows * g.cols < 2) {
      throw std::invalid_argument("grids need at least two waypoints");
    }
  }
}

std::string format_grid(GridSize grid) {
  return std::to_string(grid.rows) + "x" + std::to_string(grid.cols);
}

GridSize parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  GridSize grid{0, 0};
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    std::size_t used_r = 0;
    std::size_t used_c = 0;
    grid.rows = std::stoi(text.substr(0, x), &used_r);
    grid.cols = std::stoi(text.substr(x + 1), &used_c);
    if (used_r != x || used_c != text.size() - x - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must look like RxC, got '" + text + "'");
  }
  if (grid.rows < 1 || grid.cols < 1) throw std::invalid_argument("grid sides must be positive");
  return grid;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Cell> cells;
  for (const auto& grid : cfg.grids) {
    for (std::size_t h : cfg.heading_counts) {
      for (double v : cfg.v_sweep) {
        if (cfg.include_ddtsp) cells.push_back({grid, h, v, std::nullopt});
        for (const auto& fractions : cfg.speed_fraction_sets) cells.push_back({grid, h, v, fractions});
      }
    }
  }

  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cells.size())));
  const unsigned solver_threads =
      workers == 1 ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
  std::vector<std::optional<ResultRow>> slots(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      try {
        slots[k] = run_cell(cfg, cells[k], solver_threads);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  ExperimentResult result;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    if (slots[k]->status == "capacity") result.capacity_failure = true;
    result.rows.push_back(std::move(*slots[k]));
  }
  return result;
}

std::vector<ImprovementRow> improvement_stats(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::size_t>, double> baseline;
  for (const auto& row : rows) {
    if (row.method == "DDTSP" && std::abs(row.v_max - kBaselineSpeed) < 1e-9) {
      baseline[{row.grid, row.headings}] = row.objective;
    }
  }
  std::map<std::tuple<std::size_t, std::size_t, double>, std::pair<double, std::size_t>> sums;
  for (const auto& row : rows) {
    if (row.method != "TBTSP") continue;
    const auto it = baseline.find({row.grid, row.headings});
    if (it == baseline.end()) {
      throw MissingBaselineError("no DDTSP result at v = 1.5 m/s for grid " + row.grid +
                                 " with " + std::to_string(row.headings) + " headings");
    }
    auto& [sum, count] = sums[{row.headings, row.speeds, row.v_max}];
    sum += 100.0 * (it->second - row.objective) / it->second;
    ++count;
  }
  std::vector<ImprovementRow> out;
  for (const auto& [key, acc] : sums) {
    const auto& [h, s, v] = key;
    out.push_back({h, s, v, acc.first / static_cast<double>(acc.second), acc.second});
  }
  return out;
}

std::vector<TrajectorySample> tour_trajectory(const Instance& instance, const ResultRow& row,
                                              double dt) {
  const auto& tour = row.tour;
  const auto& scheme = instance.scheme();
  const auto& limits = instance.limits();
  const std::size_t n = tour.order.size();
  std::vector<TrajectorySample> out;
  double offset = 0.0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t nxt = (pos + 1) % n;
    const Waypoint& a = instance.waypoint(tour.order[pos]);
    const Waypoint& b = instance.waypoint(tour.order[nxt]);
    if (row.method == "TBTSP") {
      const PlanarTrajectory traj =
          planar_time_optimal({a.x, a.y}, config_velocity(tour.configs[pos], scheme), {b.x, b.y},
                              config_velocity(tour.configs[nxt], scheme), limits);
      append_samples(out, sample(traj, dt), offset);
      offset += traj.duration;
    } else {
      const auto headings = scheme.headings();
      const Pose from = make_pose(
          a.x, a.y, heading_to_psi(headings[static_cast<std::size_t>(tour.configs[pos].heading_idx)]));
      const Pose to = make_pose(
          b.x, b.y, heading_to_psi(headings[static_cast<std::size_t>(tour.configs[nxt].heading_idx)]));
      const DubinsPath path = shortest_dubins(from, to, min_turn_radius(limits));
      append_samples(out, sample_dubins(from, path, limits.v_max(), dt), offset);
      offset += path.length / limits.v_max();
    }
  }
  return out;
}

std::string tour_to_json(const TourSolution& tour) {
  nlohmann::ordered_json doc;
  doc["order"] = tour.order;
  doc["configs"] = nlohmann::ordered_json::array();
  for (const auto& c : tour.configs) {
    nlohmann::ordered_json entry;
    entry["wp"] = c.waypoint;
    entry["heading_idx"] = c.heading_idx;
    entry["speed_idx"] = c.speed_idx;
    doc["configs"].push_back(entry);
  }
  doc["total_time"] = tour.total_time;
  doc["optimal"] = tour.optimal;
  doc["gap"] = tour.gap;
  return doc.dump(2);
}

void emit_outputs(const std::filesystem::path& dir, const std::vector<ResultRow>& rows,
                  const std::vector<ImprovementRow>& stats, double dt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());

  {
    const auto path = dir / "results.csv";
    auto out = open_output(path);
    out << "label,grid,method,v_max,headings,speeds,objective,optimal,gap,status\n";
    for (const auto& r : rows) {
      out << r.label << ',' << r.grid << ',' << r.method << ',' << format_number("%g", r.v_max)
          << ',' << r.headings << ',' << r.speeds << ',' << format_number("%.6f", r.objective)
          << ',' << (r.optimal ? "true" : "false") << ',' << format_number("%.6f", r.gap) << ','
          << r.status << '\n';
    }
    close_output(out, path);
  }
  {
    const auto path = dir / "timings.csv";
    auto out = open_output(path);
    out << "label,build_time,solve_time\n";
    for (const auto& r : rows) {
      out << r.label << ',' << format_number("%.6f", r.build_time) << ','
          << format_number("%.6f", r.solve_time) << '\n';
    }
    close_output(out, path);
  }
  {
    const auto path = dir / "improvement.csv";
    auto out = open_output(path);
    out << "headings,speeds,v_max,improvement_pct,instances\n";
    for (const auto& s : stats) {
      out << s.headings << ',' << s.speeds << ',' << format_number("%g", s.v_max) << ','
          << format_number("%.4f", s.improvement) << ',' << s.instances << '\n';
    }
    close_output(out, path);
  }
  for (const auto& r : rows) {
    if (r.tour.order.empty()) continue;
    {
      const auto path = dir / ("tour_" + r.label + ".json");
      auto out = open_output(path);
      out << tour_to_json(r.tour) << '\n';
      close_output(out, path);
    }
    if (r.instance) {
      const auto path = dir / ("trajectory_" + r.label + ".csv");
      auto out = open_output(path);
      write_samples_csv(out, tour_trajectory(*r.instance, r, dt));
      close_output(out, path);
    }
  }
}

}  // namespace tbtsp
