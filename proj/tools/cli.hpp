#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multicap/config.hpp"
#include "multicap/scenario.hpp"
#include "multicap/simulator.hpp"

namespace multicap::cli {

// Exit codes of `multicap run`.
inline constexpr int kExitComplete = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIncomplete = 2;

struct RunRequest {
  std::string map_path;
  SimulationConfig config;
  std::string svg_path;    // empty: no render
  std::string trace_path;  // empty: no trace file
};

// Runs one simulation and prints its metrics as a JSON object on `out`.
int cmd_run(const RunRequest& request, std::ostream& out, std::ostream& err);

std::string metrics_json(const RunMetrics& metrics, const std::string& scenario,
                         PlannerVariant variant, int robots, std::uint64_t seed);

struct BenchmarkSpec {
  std::vector<std::string> scenarios;  // map file paths
  std::vector<int> robot_counts;
  std::vector<PlannerVariant> variants;
  int repetitions = 1;
  std::uint64_t seed_base = 0;
  SimulationConfig base;  // sensor range, subarea size, ...
};

// key = value text: scenarios, robot_counts, variants (comma separated),
// repetitions, seed_base, plus any simulation config key applied to every
// run. Relative scenario paths resolve against `base_dir`. Throws
// std::invalid_argument for empty lists or repetitions < 1.
BenchmarkSpec parse_bench_spec(std::string_view text, const std::string& base_dir = {});
BenchmarkSpec load_bench_spec(const std::string& path);

struct BenchRow {
  std::string scenario;
  PlannerVariant variant = PlannerVariant::Full;
  int robots = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  double wall_ms = 0.0;
  std::string error;  // non-empty when the run failed
  std::vector<ExitPlanRecord> exit_plans;
  SafetyCounters safety;
};

struct BenchOptions {
  int threads = 0;      // 0: MULTICAP_THREADS or the hardware concurrency
  bool timing = true;   // false: wall_ms is written as 0 for byte-stable CSVs
  bool keep_plans = false;
};

// Every (scenario, variant, robots, repetition) combination, sorted by
// (scenario, variant, robots, seed). Failed runs carry an error message.
std::vector<BenchRow> run_bench(const BenchmarkSpec& spec, const BenchOptions& options = {});

std::string format_csv(const std::vector<BenchRow>& rows);

// Mean, min and max per (scenario, variant, robots).
std::string format_summary(const std::vector<BenchRow>& rows);

int cmd_bench(const std::string& spec_path, const std::string& csv_path,
              const BenchOptions& options, std::ostream& out, std::ostream& err);

// Worker count from MULTICAP_THREADS (if set and positive), else hardware.
int default_threads();

// Obstacles as filled squares, one polyline per robot, start markers.
// Throws std::invalid_argument when the trace does not fit the map.
std::string render_svg(const Scenario& scenario, const std::vector<TickRecord>& trace);

// Connectivity-aware graph of the fully observed map.
std::string graph_dump(const Scenario& scenario, double subarea_size_m);

}  // namespace multicap::cli
