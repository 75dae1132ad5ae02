#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cli.hpp"
#include "multicap/adjacency_graph.hpp"
#include "multicap/global_planner.hpp"
#include "multicap/local_planner.hpp"
#include "multicap/simulator.hpp"
#include "multicap/trace.hpp"
#include "test_support.hpp"

using namespace multicap;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

SafetyCounters g_safety;
long g_safety_runs = 0;

void add_safety(const SafetyCounters& s) {
  g_safety.same_cell_events += s.same_cell_events;
  g_safety.obstacle_entries += s.obstacle_entries;
  ++g_safety_runs;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

Outcome complete_coverage() {
  const auto t0 = Clock::now();
  int runs = 0, failed = 0;
  long worst_ticks = 0;
  std::string first_failure;
  for (std::uint64_t map_seed = 0; map_seed < 100; ++map_seed) {
    const double density = 0.05 + 0.2 * static_cast<double>(map_seed % 5) / 4.0;
    const auto sc = testing::random_connected_scenario(20, 20, density, 2.0, 7000 + map_seed);
    for (int robots = 1; robots <= 3; ++robots) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        SimulationConfig c;
        c.robots = robots;
        c.seed = seed;
        const auto res = Simulator(sc, c).run();
        add_safety(res.safety);
        ++runs;
        worst_ticks = std::max(worst_ticks, res.metrics.coverage_time);
        const bool ok = res.metrics.covered_fraction == 1.0 && !res.metrics.budget_exhausted &&
                        res.metrics.coverage_time <= 50L * sc.tiling.cell_count();
        if (!ok) {
          ++failed;
          if (first_failure.empty()) {
            first_failure = format(" first failure: map %llu robots %d seed %llu cf %.4f",
                                   static_cast<unsigned long long>(map_seed), robots,
                                   static_cast<unsigned long long>(seed),
                                   res.metrics.covered_fraction);
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {failed == 0 && secs < 60.0,
          format("%d/%d runs fully covered, worst %ld ticks (budget %d), %.1f s (limit 60 s)",
                 runs - failed, runs, worst_ticks, 50 * 400, secs) +
              first_failure};
}

Outcome incremental_graph() {
  int equal = 0;
  const int maps = 200;
  for (std::uint64_t seed = 0; seed < maps; ++seed) {
    const double density = 0.1 + 0.15 * static_cast<double>(seed % 4) / 3.0;
    const auto s = testing::random_connected_scenario(12, 12, density, 1.0, 20000 + seed);
    std::mt19937_64 rng(seed * 31 + 7);
    const int block = 2 + static_cast<int>(rng() % 4);
    auto map = s.make_map();
    auto g = AdjacencyGraph::initialize(map, block);
    std::vector<CellIndex> order(144);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < order.size();) {
      const std::size_t batch = 1 + rng() % 16;
      std::vector<Observation> obs;
      for (std::size_t j = k; j < std::min(order.size(), k + batch); ++j) {
        const auto c = order[j];
        obs.push_back(map.truth(c) == Occupancy::Free ? Observation::free(c)
                                                      : Observation::obstacle(c));
      }
      k += batch;
      g.refine(map, map.apply_observation(obs));
    }
    const auto shape = testing::shape_of(g);
    if (shape == testing::shape_of(AdjacencyGraph::initialize(map, block)) &&
        shape == testing::oracle_shape(map, block)) {
      ++equal;
    }
  }
  return {equal == maps, format("%d/%d incrementally refined graphs equal the rebuild and the "
                                "union-find oracle",
                                equal, maps)};
}

// Grid-distance instance: robots and candidates at random free cells.
CostMatrix grid_vrp_instance(std::mt19937_64& rng, std::size_t robots, std::size_t cands) {
  const auto sc = testing::random_connected_scenario(14, 14, 0.2, 1.0, rng());
  auto map = sc.make_map();
  testing::reveal_all(map);
  std::vector<CellIndex> free;
  for (CellIndex c = 0; c < sc.tiling.cell_count(); ++c) {
    if (sc.truth[static_cast<std::size_t>(c)] == Occupancy::Free) free.push_back(c);
  }
  std::shuffle(free.begin(), free.end(), rng);
  const auto n = robots + cands;
  CostMatrix w(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = testing::dijkstra_oracle(map, free[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) w.set(i, j, d[static_cast<std::size_t>(free[j])]);
    }
    w.set_symmetric(n, i, i < robots ? 0.0 : kInf);
  }
  return w;
}

Outcome oracle_gap() {
  std::mt19937_64 rng(99);
  const int instances = 200;
  int vrp_within = 0, vrp_below = 0, tsp_within = 0, tsp_below = 0, two_opt_up = 0;
  double worst = 1.0;
  for (int trial = 0; trial < instances; ++trial) {
    const std::size_t robots = 1 + rng() % 2;
    const std::size_t cands = 1 + rng() % 8;
    const auto w = grid_vrp_instance(rng, robots, cands);
    AugmentedNodeSet aug;
    for (std::size_t m = 0; m < robots; ++m) aug.robots.push_back({static_cast<RobotId>(m), 0});
    for (std::size_t k = 0; k < cands; ++k) aug.candidates.push_back(static_cast<NodeId>(k));
    const auto sol = solve_open_mdvrp(aug, w);
    const double opt = testing::exhaustive_open_vrp(w, robots, cands);
    if (sol.total_cost < opt - 1e-9) ++vrp_below;
    if (sol.total_cost <= 1.5 * opt + 1e-9) ++vrp_within;
    if (sol.total_cost > sol.greedy_cost + 1e-9) ++two_opt_up;
    if (opt > 0) worst = std::max(worst, sol.total_cost / opt);
  }
  for (int trial = 0; trial < instances; ++trial) {
    // A compact subarea with up to eight cells to cover besides the start.
    const auto sc = testing::random_connected_scenario(5, 5, 0.15, 1.0, rng());
    auto map = sc.make_map();
    testing::reveal_all(map);
    std::vector<CellIndex> cells;
    for (CellIndex c = 0; c < 25; ++c) {
      if (sc.truth[static_cast<std::size_t>(c)] == Occupancy::Free) cells.push_back(c);
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    const std::size_t keep = std::min<std::size_t>(cells.size(), 2 + rng() % 8);
    std::vector<CellIndex> sub(cells.begin(), cells.begin() + static_cast<long>(keep));
    std::sort(sub.begin(), sub.end());
    for (auto c : cells) {
      if (!std::binary_search(sub.begin(), sub.end(), c)) map.mark_covered(c);
    }
    const auto start = sub[rng() % sub.size()];
    std::optional<CellIndex> exit;
    if (rng() % 3 != 0) exit = sub[rng() % sub.size()];
    const auto inst = build_tsp_instance(map, sub, start, exit);
    const auto order = solve_tsp_instance(inst);
    double cost = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) cost += inst.costs.at(order[k - 1], order[k]);
    const double opt = testing::exhaustive_open_path(inst.costs, inst.cells.size(), inst.has_exit);
    if (cost < opt - 1e-9) ++tsp_below;
    if (cost <= 1.5 * opt + 1e-9) ++tsp_within;
    if (opt > 0) worst = std::max(worst, cost / opt);

    // 2-opt from a random start order must never raise the cost.
    std::vector<std::size_t> cycle{inst.dummy(), 0};
    std::vector<std::size_t> middle(inst.cells.size() - 1 - (inst.has_exit ? 1 : 0));
    std::iota(middle.begin(), middle.end(), 1);
    std::shuffle(middle.begin(), middle.end(), rng);
    cycle.insert(cycle.end(), middle.begin(), middle.end());
    if (inst.has_exit) cycle.push_back(inst.cells.size() - 1);
    auto closed = cycle;
    closed.push_back(cycle.front());
    const double before = vrp::route_cost(inst.costs, closed);
    vrp::TwoOptStats stats;
    const double after = vrp::two_opt(cycle, inst.costs, 2, true, SolverOptions{}, &stats);
    bool monotone = after <= before + 1e-9;
    for (std::size_t k = 1; k < stats.pass_costs.size(); ++k) {
      monotone = monotone && stats.pass_costs[k] <= stats.pass_costs[k - 1] + 1e-9;
    }
    if (!monotone) ++two_opt_up;
  }
  const bool pass = vrp_below == 0 && tsp_below == 0 && two_opt_up == 0 &&
                    vrp_within * 100 >= 95 * instances && tsp_within * 100 >= 95 * instances;
  return {pass, format("VRP within 1.5x on %d/%d, TSP within 1.5x on %d/%d, worst ratio %.3f, "
                       "below optimum %d, 2-opt increases %d",
                       vrp_within, instances, tsp_within, instances, worst,
                       vrp_below + tsp_below, two_opt_up)};
}

struct VariantStats {
  double length = 0, overlap = 0, time = 0;
  int n = 0;
};

std::vector<cli::BenchRow> g_ablation_rows;

Outcome ablation() {
  const auto spec = cli::load_bench_spec(std::string(MULTICAP_ABLATION_SPEC));
  cli::BenchOptions opt;
  opt.timing = false;
  opt.keep_plans = true;
  const auto t0 = Clock::now();
  g_ablation_rows = cli::run_bench(spec, opt);
  const double secs = seconds_since(t0);
  VariantStats s[3];
  int errors = 0;
  for (const auto& r : g_ablation_rows) {
    if (!r.error.empty()) {
      ++errors;
      continue;
    }
    add_safety(r.safety);
    auto& v = s[static_cast<int>(r.variant)];
    v.length += r.metrics.total_path_length_m;
    v.overlap += r.metrics.overlap_ratio;
    v.time += static_cast<double>(r.metrics.coverage_time);
    ++v.n;
  }
  for (auto& v : s) {
    if (v.n == 0) return {false, "a variant has no successful runs"};
    v.length /= v.n;
    v.overlap /= v.n;
    v.time /= v.n;
  }
  const auto& full = s[static_cast<int>(PlannerVariant::Full)];
  const auto& no_ca = s[static_cast<int>(PlannerVariant::WithoutCA)];
  const auto& no_gt = s[static_cast<int>(PlannerVariant::WithoutGT)];
  const double time_delta = (full.time - no_gt.time) / no_gt.time;
  const bool pass = errors == 0 && full.length < no_ca.length && full.overlap < no_ca.overlap &&
                    full.length < no_gt.length && std::abs(time_delta) <= 0.10;
  return {pass, format("%zu runs in %.1f s; length full %.1f / no_ca %.1f / no_gt %.1f m, overlap "
                       "full %.4f / no_ca %.4f, coverage time full vs no_gt %+.1f%%",
                       g_ablation_rows.size(), secs, full.length, no_ca.length, no_gt.length,
                       full.overlap, no_ca.overlap, 100.0 * time_delta)};
}

Outcome boustrophedon() {
  SymbolicMap map(Tiling(10, 10, 1.0), std::vector<Occupancy>(100, Occupancy::Free));
  testing::reveal_all(map);
  std::vector<CellIndex> sub(100);
  std::iota(sub.begin(), sub.end(), 0);
  std::vector<int> visits(100, 0);
  std::vector<CellIndex> path{0};
  visits[0] = 1;
  map.mark_covered(0);
  for (int guard = 0; guard < 1000; ++guard) {
    const auto s = sweep_step(map, sub, path.back());
    if (s.kind == LocalStep::Kind::Done) break;
    path.push_back(s.cell);
    ++visits[static_cast<std::size_t>(s.cell)];
    if (map.label(s.cell) == CellLabel::UncoveredFree) map.mark_covered(s.cell);
  }
  int covered = 0, repeats = 0;
  for (auto v : visits) {
    covered += v > 0 ? 1 : 0;
    repeats += std::max(v - 1, 0);
  }
  bool columns = true;
  const auto& t = map.tiling();
  for (std::size_t k = 1; k < path.size(); ++k) {
    columns = columns && t.coord(path[k]).col >= t.coord(path[k - 1]).col;
  }
  const double overlap = repeats / 100.0;
  return {covered == 100 && overlap == 0.0 && columns,
          format("%d/100 cells covered, overlap ratio %.3f, column order %s", covered, overlap,
                 columns ? "non-decreasing" : "violated")};
}

Outcome exit_constraint() {
  // A plan still being followed when coverage completes was cut short by the
  // end of the run; those are counted but have no final in-subarea cell yet.
  long plans = 0, finished = 0, held = 0;
  std::map<std::string, long> ends;
  for (const auto& r : g_ablation_rows) {
    for (const auto& p : r.exit_plans) {
      if (p.exit == kNoCell) continue;
      ++plans;
      ++ends[to_string(p.end)];
      if (p.end == PlanEnd::Open) continue;
      ++finished;
      if (p.last_in_subarea() == p.exit) ++held;
    }
  }
  std::string tally;
  for (const auto& [name, n] : ends) {
    tally += format("%s%s %ld", tally.empty() ? "" : ", ", name.c_str(), n);
  }
  return {finished > 0 && held == finished,
          format("%ld/%ld finished exit-constrained plans left their subarea at the exit cell; "
                 "%ld plans in total (",
                 held, finished, plans) +
              tally + ")"};
}

Outcome scaling() {
  const int sizes[] = {30, 60, 120};
  std::vector<double> xs, ys;
  std::string detail;
  for (int n : sizes) {
    Scenario sc{"open", Tiling(n, n, 1.0),
                std::vector<Occupancy>(static_cast<std::size_t>(n * n), Occupancy::Free)};
    SimulationConfig c;
    c.robots = 3;
    c.subarea_size_m = 6.0 * n / 30.0;
    std::vector<double> samples;
    for (int rep = 0; rep < 5; ++rep) {
      Simulator sim(sc, c);
      const auto t0 = Clock::now();
      sim.plan_only();
      samples.push_back(seconds_since(t0));
    }
    std::sort(samples.begin(), samples.end());
    const double median = samples[samples.size() / 2];
    xs.push_back(std::log(static_cast<double>(n * n)));
    ys.push_back(std::log(median));
    detail += format("%s|T|=%d %.2f ms", detail.empty() ? "" : ", ", n * n, 1000.0 * median);
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = num / den;
  return {slope < 2.0, detail + format("; fitted exponent %.2f (limit 2.0)", slope)};
}

Outcome safety_determinism() {
  int identical = 0, checked = 0;
  const char* scenes[] = {"gallery", "warehouse", "office", "maze"};
  for (const char* name : scenes) {
    const auto sc = load_scenario(std::string(MULTICAP_SCENARIO_DIR) + "/" + name + ".map");
    SimulationConfig c;
    c.robots = 3;
    c.seed = 11;
    const auto a = Simulator(sc, c).run();
    const auto b = Simulator(sc, c).run();
    add_safety(a.safety);
    add_safety(b.safety);
    ++checked;
    if (format_trace(a.trace, sc.tiling) == format_trace(b.trace, sc.tiling)) ++identical;
  }
  auto spec = cli::load_bench_spec(std::string(MULTICAP_ABLATION_SPEC));
  spec.repetitions = 1;
  cli::BenchOptions opt;
  opt.timing = false;
  opt.threads = 1;
  const auto first = cli::format_csv(cli::run_bench(spec, opt));
  opt.threads = 3;
  const auto second = cli::format_csv(cli::run_bench(spec, opt));
  const bool csv_equal = first == second;
  const bool safe = g_safety.same_cell_events == 0 && g_safety.obstacle_entries == 0;
  return {safe && csv_equal && identical == checked,
          format("%ld same-cell events and %ld obstacle entries over %ld runs; %d/%d traces "
                 "byte-identical; bench CSV %s",
                 g_safety.same_cell_events, g_safety.obstacle_entries, g_safety_runs, identical,
                 checked, csv_equal ? "byte-identical" : "differs")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  // The exit check reads the plans logged by the ablation sweep and the
  // safety check totals every run before it.
  const Criterion criteria[] = {
      {"complete-coverage", complete_coverage}, {"incremental-graph", incremental_graph},
      {"oracle-gap", oracle_gap},               {"ablation-directionality", ablation},
      {"boustrophedon", boustrophedon},         {"exit-constraint", exit_constraint},
      {"scaling", scaling},                     {"safety-determinism", safety_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
