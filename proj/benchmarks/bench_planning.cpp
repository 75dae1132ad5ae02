#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "multicap/adjacency_graph.hpp"
#include "multicap/global_planner.hpp"
#include "multicap/local_planner.hpp"
#include "multicap/scenario.hpp"
#include "multicap/simulator.hpp"

using namespace multicap;

namespace {

Scenario open_scenario(int n) {
  return Scenario{"open", Tiling(n, n, 1.0),
                  std::vector<Occupancy>(static_cast<std::size_t>(n * n), Occupancy::Free)};
}

// Open n x n map with sparse random pillars.
Scenario pillar_scenario(int n, std::uint64_t seed) {
  auto sc = open_scenario(n);
  std::mt19937_64 rng(seed);
  for (auto& o : sc.truth) {
    if (rng() % 10 == 0) o = Occupancy::Obstacle;
  }
  return sc;
}

}  // namespace

// One closed-loop tick on a bundled scene, averaged over a full run.
static void BM_simulator_run(benchmark::State& state) {
  const auto sc = load_scenario(std::string(MULTICAP_SCENARIO_DIR) + "/warehouse.map");
  SimulationConfig c;
  c.robots = static_cast<int>(state.range(0));
  long ticks = 0;
  for (auto _ : state) {
    Simulator sim(sc, c);
    const auto res = sim.run();
    ticks += res.metrics.coverage_time;
    benchmark::DoNotOptimize(res.metrics.total_path_length_m);
  }
  state.counters["ticks_per_run"] =
      benchmark::Counter(static_cast<double>(ticks), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_simulator_run)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

// Sense, refine and replan without motion, as used by the scaling check.
static void BM_plan_only(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sc = open_scenario(n);
  SimulationConfig c;
  c.subarea_size_m = 6.0 * n / 30.0;
  for (auto _ : state) {
    state.PauseTiming();
    Simulator sim(sc, c);
    state.ResumeTiming();
    sim.plan_only();
  }
  state.SetComplexityN(n * n);
}
BENCHMARK(BM_plan_only)->Arg(30)->Arg(60)->Arg(120)->Complexity()->Unit(benchmark::kMillisecond);

// Incremental refinement as a full map is revealed in random batches.
static void BM_refine(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sc = pillar_scenario(n, 3);
  std::vector<CellIndex> order(static_cast<std::size_t>(n * n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(5));
  for (auto _ : state) {
    state.PauseTiming();
    auto map = sc.make_map();
    auto g = AdjacencyGraph::initialize(map, 4);
    state.ResumeTiming();
    for (std::size_t k = 0; k < order.size(); k += 64) {
      std::vector<Observation> obs;
      for (std::size_t j = k; j < std::min(order.size(), k + 64); ++j) {
        const auto c = order[j];
        obs.push_back(map.truth(c) == Occupancy::Free ? Observation::free(c)
                                                      : Observation::obstacle(c));
      }
      g.refine(map, map.apply_observation(obs));
    }
    benchmark::DoNotOptimize(g.nodes().size());
  }
}
BENCHMARK(BM_refine)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

// Greedy construction plus 2-opt on planar instances with K candidates.
static void BM_vrp(benchmark::State& state) {
  const auto cands = static_cast<std::size_t>(state.range(0));
  const std::size_t robots = 3;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < robots + cands; ++i) pts.emplace_back(coord(rng), coord(rng));
  const auto n = pts.size();
  CostMatrix w(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      w.set(i, j, std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second));
    }
    w.set_symmetric(n, i, i < robots ? 0.0 : kInf);
  }
  AugmentedNodeSet aug;
  for (std::size_t m = 0; m < robots; ++m) aug.robots.push_back({static_cast<RobotId>(m), 0});
  for (std::size_t k = 0; k < cands; ++k) aug.candidates.push_back(static_cast<NodeId>(k));
  for (auto _ : state) {
    const auto sol = solve_open_mdvrp(aug, w);
    benchmark::DoNotOptimize(sol.total_cost);
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(cands));
}
BENCHMARK(BM_vrp)->RangeMultiplier(2)->Range(8, 128)->Complexity();

// Case-2 coverage path through a 6 x 6 subarea.
static void BM_tsp_coverage(benchmark::State& state) {
  const auto sc = pillar_scenario(12, 9);
  auto map = sc.make_map();
  std::vector<Observation> all;
  for (CellIndex c = 0; c < sc.tiling.cell_count(); ++c) {
    all.push_back(map.truth(c) == Occupancy::Free ? Observation::free(c)
                                                  : Observation::obstacle(c));
  }
  map.apply_observation(all);
  std::vector<CellIndex> sub;
  for (int r = 0; r < 6; ++r) {
    for (int col = 0; col < 6; ++col) {
      const auto c = sc.tiling.index({r, col});
      if (!map.is_obstacle(c)) sub.push_back(c);
    }
  }
  for (auto _ : state) {
    const auto path = plan_tsp_coverage(map, sub, sub.front(), sub.back());
    benchmark::DoNotOptimize(path.size());
  }
}
BENCHMARK(BM_tsp_coverage);

BENCHMARK_MAIN();
