#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace multicap;
  CLI::App app{"multicap: hierarchical multi-robot coverage planner and simulator"};
  app.require_subcommand(1);

  cli::RunRequest run;
  std::string config_path, variant = "full", starts;
  int robots = 0;
  double subarea = 0, cell = 0, sensor = 0, threshold = -1;
  long budget = 0;
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "simulate one coverage run and print metrics (JSON)");
  run_cmd->add_option("--map", run.map_path, "scenario map file")->required();
  run_cmd->add_option("--config", config_path, "key = value config file (flags override it)");
  auto* robots_opt = run_cmd->add_option("--robots", robots, "number of robots");
  auto* starts_opt = run_cmd->add_option("--starts", starts, "start cells 'r,c;r,c;...'");
  auto* variant_opt = run_cmd->add_option("--variant", variant, "full, no_ca or no_gt");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "seed for default start placement");
  auto* budget_opt = run_cmd->add_option("--budget", budget, "step budget in ticks");
  auto* subarea_opt = run_cmd->add_option("--subarea-size-m", subarea, "subarea edge length");
  auto* cell_opt = run_cmd->add_option("--cell-size-m", cell, "override the map cell size");
  auto* sensor_opt = run_cmd->add_option("--sensor-range-m", sensor, "sensor range");
  auto* threshold_opt =
      run_cmd->add_option("--occupancy-threshold", threshold, "obstacle probability threshold");
  run_cmd->add_option("--svg", run.svg_path, "write an SVG render of the paths");
  run_cmd->add_option("--trace", run.trace_path, "write the per-tick trace (JSON lines)");

  std::string spec_path, csv_path;
  cli::BenchOptions bench;
  bool no_timing = false;
  auto* bench_cmd = app.add_subcommand("bench", "run a parameter sweep and write a CSV table");
  bench_cmd->add_option("spec", spec_path, "bench spec file")->required();
  bench_cmd->add_option("--out,-o", csv_path, "CSV output path (default: stdout)");
  bench_cmd->add_option("--threads", bench.threads, "worker threads (default MULTICAP_THREADS)");
  bench_cmd->add_flag("--no-timing", no_timing, "write wall_ms as 0 for reproducible CSVs");

  std::string graph_map;
  double graph_subarea = 6.0;
  auto* graph_cmd = app.add_subcommand("graph", "dump the adjacency graph of a fully known map");
  graph_cmd->add_option("--map", graph_map, "scenario map file")->required();
  graph_cmd->add_option("--subarea-size-m", graph_subarea, "subarea edge length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitError;
  }

  try {
    if (*run_cmd) {
      SimulationConfig config;
      if (!config_path.empty()) config = load_config(config_path);
      if (*starts_opt) {
        config.start_cells = parse_start_cells(starts);
        if (!*robots_opt) config.robots = static_cast<int>(config.start_cells.size());
      }
      if (*robots_opt) config.robots = robots;
      if (*variant_opt) config.variant = parse_variant(variant);
      if (*seed_opt) config.seed = seed;
      if (*budget_opt) config.step_budget = budget;
      if (*subarea_opt) config.subarea_size_m = subarea;
      if (*cell_opt) config.cell_size_m = cell;
      if (*sensor_opt) config.sensor_range_m = sensor;
      if (*threshold_opt) config.occupancy_threshold = threshold;
      run.config = config;
      return cli::cmd_run(run, std::cout, std::cerr);
    }
    if (*bench_cmd) {
      bench.timing = !no_timing;
      return cli::cmd_bench(spec_path, csv_path, bench, std::cout, std::cerr);
    }
    if (*graph_cmd) {
      std::cout << cli::graph_dump(load_scenario(graph_map), graph_subarea);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitError;
  }
  return cli::kExitError;
}
