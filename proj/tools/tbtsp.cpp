#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "tbtsp/bench.hpp"
#include "tbtsp/cost_tensor.hpp"
#include "tbtsp/milp.hpp"
#include "tbtsp/model.hpp"
#include "tbtsp/solver.hpp"

namespace {

using namespace tbtsp;

constexpr int kExitIo = 1;
constexpr int kExitCapacity = 2;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad speed fraction '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty speed fraction list");
  return out;
}

struct InstanceArgs {
  std::string instance_file;
  std::string grid{"3x3"};
  double spacing{9.0};
  double v_max{1.5};
  double a_max{0.5};
  std::size_t headings{8};
  std::string speeds{"0.2,0.6,1.0"};

  void add(CLI::App* app) {
    app->add_option("--instance", instance_file, "Instance JSON (overrides the grid flags)");
    app->add_option("--grid", grid, "Grid size RxC");
    app->add_option("--spacing", spacing, "Grid spacing in m");
    app->add_option("--vmax", v_max, "Maximum velocity in m/s");
    app->add_option("--amax", a_max, "Maximum acceleration in m/s^2");
    app->add_option("--headings", headings, "Number of headings");
    app->add_option("--speeds", speeds, "Comma-separated speed fractions of v_max/sqrt(2)");
  }

  [[nodiscard]] Instance build() const {
    if (!instance_file.empty()) {
      std::ifstream in(instance_file);
      if (!in) throw IoFailure("cannot read " + instance_file);
      std::stringstream text;
      text << in.rdbuf();
      return instance_from_json(text.str());
    }
    const GridSize g = parse_grid(grid);
    const KinematicLimits limits(v_max, a_max);
    const auto fractions = parse_fractions(speeds);
    return make_grid_instance(g.rows, g.cols, spacing, limits,
                              make_scheme(headings, fractions, limits));
  }
};

TensorKind parse_kind(const std::string& kind) {
  if (kind == "tbtsp") return TensorKind::kTbtsp;
  if (kind == "ddtsp") return TensorKind::kDdtsp;
  throw std::invalid_argument("kind must be tbtsp or ddtsp");
}

Instance for_kind(const Instance& instance, TensorKind kind) {
  if (kind == TensorKind::kTbtsp) return instance;
  const std::vector<double> full = {1.0};
  return Instance({instance.waypoints().begin(), instance.waypoints().end()}, instance.limits(),
                  make_scheme(instance.scheme().heading_count(), full, instance.limits()));
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path);
  out << text;
  if (!out) throw IoFailure("failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal multi-configuration waypoint routing"};
  app.require_subcommand(1);

  InstanceArgs gen_args;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a grid instance as JSON");
  gen_args.add(gen);
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

  InstanceArgs cost_args;
  std::string cost_kind = "tbtsp";
  std::string cost_cache;
  std::string cost_out;
  unsigned cost_threads = 0;
  auto* costs = app.add_subcommand("costs", "Build a cost tensor and store it in the cache");
  cost_args.add(costs);
  costs->add_option("--kind", cost_kind, "tbtsp or ddtsp");
  costs->add_option("--cache-dir", cost_cache, "Cache directory");
  costs->add_option("--out", cost_out, "Explicit cache file to write");
  costs->add_option("--threads", cost_threads, "Worker threads (0 = all cores)");

  InstanceArgs solve_args;
  std::string solve_kind = "tbtsp";
  std::string solve_solver = "exact";
  std::uint64_t solve_budget = ExactOptions{}.budget;
  std::uint64_t solve_seed = 1;
  std::string solve_out;
  std::string solve_cache;
  double solve_dt = 0.1;
  auto* solve = app.add_subcommand("solve", "Solve one instance");
  solve_args.add(solve);
  solve->add_option("--kind", solve_kind, "tbtsp or ddtsp");
  solve->add_option("--solver", solve_solver, "exact or heuristic");
  solve->add_option("--budget", solve_budget, "Exact solver relaxation budget");
  solve->add_option("--seed", solve_seed, "Heuristic seed");
  solve->add_option("--out", solve_out, "Directory for tour JSON and trajectory CSV");
  solve->add_option("--cache-dir", solve_cache, "Cost cache directory");
  solve->add_option("--dt", solve_dt, "Trajectory sampling interval in s");

  std::vector<std::string> bench_grids = {"3x3", "3x4", "4x4"};
  std::vector<double> bench_v = {1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<std::size_t> bench_headings = {8};
  std::vector<std::string> bench_speeds = {"0.2,0.6,1.0"};
  ExperimentConfig bench_cfg;
  std::string bench_solver = "exact";
  std::string bench_out = "results";
  std::string bench_cache;
  double bench_dt = 0.1;
  auto* bench = app.add_subcommand("bench", "Run the velocity sweep and write tables");
  bench->add_option("--grid", bench_grids, "Grid sizes RxC (repeatable)");
  bench->add_option("--spacing", bench_cfg.spacing, "Grid spacing in m");
  bench->add_option("--vmax", bench_v, "Maximum velocities in m/s (repeatable)");
  bench->add_option("--amax", bench_cfg.a_max, "Maximum acceleration in m/s^2");
  bench->add_option("--headings", bench_headings, "Heading counts (repeatable)");
  bench->add_option("--speeds", bench_speeds, "Speed fraction lists (repeatable)");
  bench->add_option("--solver", bench_solver, "exact or heuristic");
  bench->add_option("--budget", bench_cfg.budget, "Exact solver relaxation budget");
  bench->add_option("--out", bench_out, "Output directory");
  bench->add_option("--cache-dir", bench_cache, "Cost cache directory");
  bench->add_option("--seed", bench_cfg.seed, "Heuristic seed");
  bench->add_option("--workers", bench_cfg.workers, "Parallel sweep cells");
  bench->add_option("--dt", bench_dt, "Trajectory sampling interval in s");

  InstanceArgs lp_args;
  std::string lp_kind = "tbtsp";
  std::string lp_out;
  auto* export_lp = app.add_subcommand("export-lp", "Write the routing model in LP format");
  lp_args.add(export_lp);
  export_lp->add_option("--kind", lp_kind, "tbtsp or ddtsp");
  export_lp->add_option("--out", lp_out, "Output .lp file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      write_text(gen_out, instance_to_json(gen_args.build()) + "\n");
    } else if (costs->parsed()) {
      const TensorKind kind = parse_kind(cost_kind);
      const Instance instance = for_kind(cost_args.build(), kind);
      const unsigned threads = cost_threads ? cost_threads : std::thread::hardware_concurrency();
      const CostTensor tensor = load_or_build(instance, kind, cost_cache, threads);
      if (!cost_out.empty()) write_cache(tensor, instance_hash(instance), cost_out);
      std::printf("%s tensor: n=%zu h=%zu s=%zu edges=%llu\n", std::string(to_string(kind)).c_str(),
                  tensor.n(), tensor.h(), tensor.s(),
                  static_cast<unsigned long long>(tensor.edges().omega));
    } else if (solve->parsed()) {
      const TensorKind kind = parse_kind(solve_kind);
      const Instance instance = for_kind(solve_args.build(), kind);
      const CostTensor tensor =
          load_or_build(instance, kind, solve_cache, std::thread::hardware_concurrency());
      ResultRow row;
      row.method = kind == TensorKind::kTbtsp ? "TBTSP" : "DDTSP";
      if (solve_solver == "exact") {
        ExactOptions options;
        options.budget = solve_budget;
        options.seed = solve_seed;
        options.threads = std::thread::hardware_concurrency();
        try {
          row.tour = solve_exact(tensor, options);
        } catch (const CapacityError& e) {
          std::fprintf(stderr, "%s\n", e.what());
          return kExitCapacity;
        }
      } else if (solve_solver == "heuristic") {
        row.tour = solve_heuristic(tensor, solve_seed);
      } else {
        throw std::invalid_argument("solver must be exact or heuristic");
      }
      const std::string doc = tour_to_json(row.tour);
      if (solve_out.empty()) {
        std::cout << doc << '\n';
      } else {
        std::filesystem::create_directories(solve_out);
        write_text((std::filesystem::path(solve_out) / "tour.json").string(), doc + "\n");
        std::ofstream csv(std::filesystem::path(solve_out) / "trajectory.csv");
        if (!csv) throw IoFailure("cannot write trajectory.csv in " + solve_out);
        write_samples_csv(csv, tour_trajectory(instance, row, solve_dt));
        std::printf("total_time=%.6f optimal=%s\n", row.tour.total_time,
                    row.tour.optimal ? "true" : "false");
      }
    } else if (bench->parsed()) {
      for (const auto& g : bench_grids) bench_cfg.grids.push_back(parse_grid(g));
      bench_cfg.v_sweep = bench_v;
      bench_cfg.heading_counts = bench_headings;
      for (const auto& s : bench_speeds) bench_cfg.speed_fraction_sets.push_back(parse_fractions(s));
      if (bench_solver == "exact") {
        bench_cfg.solver = SolverChoice::kExact;
      } else if (bench_solver == "heuristic") {
        bench_cfg.solver = SolverChoice::kHeuristic;
      } else {
        throw std::invalid_argument("solver must be exact or heuristic");
      }
      bench_cfg.output_dir = bench_out;
      bench_cfg.cache_dir = bench_cache;
      const ExperimentResult result = run_experiment(bench_cfg);
      std::vector<ImprovementRow> stats;
      try {
        stats = improvement_stats(result.rows);
      } catch (const MissingBaselineError& e) {
        std::fprintf(stderr, "improvement table skipped: %s\n", e.what());
      }
      emit_outputs(bench_cfg.output_dir, result.rows, stats, bench_dt);
      for (const auto& r : result.rows) {
        std::printf("%-28s %10.2f %s %s\n", r.label.c_str(), r.objective,
                    r.optimal ? "optimal  " : "heuristic", r.status.c_str());
      }
      if (result.capacity_failure) return kExitCapacity;
    } else if (export_lp->parsed()) {
      const TensorKind kind = parse_kind(lp_kind);
      const Instance instance = for_kind(lp_args.build(), kind);
      const CostTensor tensor = kind == TensorKind::kTbtsp ? build_tbtsp_costs(instance)
                                                           : build_ddtsp_costs(instance);
      write_text(lp_out, export_milp(tensor));
    }
  } catch (const IoFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const CacheError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const OutputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return 0;
}
