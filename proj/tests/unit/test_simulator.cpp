#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "multicap/simulator.hpp"
#include "multicap/trace.hpp"
#include "test_support.hpp"

using namespace multicap;

namespace {

Scenario open_scenario(int w, int h, double cell = 1.0) {
  return Scenario{"open", Tiling(w, h, cell),
                  std::vector<Occupancy>(static_cast<std::size_t>(w * h), Occupancy::Free)};
}

SimulationConfig small_config(int robots) {
  SimulationConfig c;
  c.robots = robots;
  c.sensor_range_m = 3.0;
  c.subarea_size_m = 2.0;
  return c;
}

}  // namespace

TEST_CASE("a single robot covers a 4x4 room") {
  const auto sc = open_scenario(4, 4);
  Simulator sim(sc, small_config(1));
  const auto res = sim.run();
  CHECK(res.metrics.complete);
  CHECK(res.metrics.covered_fraction == 1.0);
  CHECK_FALSE(res.metrics.budget_exhausted);
  CHECK(res.metrics.free_cells == 16);
  CHECK(res.metrics.unreachable_free_cells == 0);
  CHECK(res.metrics.total_path_length_m >= 15.0);
  CHECK(res.start_cells == std::vector<CellIndex>{0});
}

TEST_CASE("a walled-off pocket is reported as unreachable") {
  auto sc = parse_scenario(
      "6 4 1\n"
      "......\n"
      "...###\n"
      "...#..\n"
      "...#..\n");
  SimulationConfig c = small_config(2);
  c.start_cells = {{0, 0}, {3, 0}};
  Simulator sim(sc, c);
  const auto res = sim.run();
  const auto oracle = testing::bfs_reachable(sc, res.start_cells);
  const int reachable = static_cast<int>(std::count(oracle.begin(), oracle.end(), 1));
  CHECK(res.metrics.reachable_free_cells == reachable);
  CHECK(res.metrics.unreachable_free_cells == 4);
  CHECK(res.metrics.complete);
  CHECK(res.metrics.covered_fraction < 1.0);
  CHECK(res.metrics.covered_fraction == doctest::Approx(reachable / 19.0));
}

TEST_CASE("invalid starts and parameters are rejected") {
  auto sc = parse_scenario("3 1 1\n.#.\n");
  SimulationConfig c = small_config(1);
  c.start_cells = {{0, 1}};
  CHECK_THROWS_AS(Simulator(sc, c), std::invalid_argument);
  c.start_cells = {{0, 5}};
  CHECK_THROWS_AS(Simulator(sc, c), std::invalid_argument);
  c.start_cells = {{0, 0}, {0, 2}};
  CHECK_THROWS_AS(Simulator(sc, c), std::invalid_argument);
  c.robots = 2;
  c.start_cells = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(Simulator(sc, c), std::invalid_argument);
  SimulationConfig bad = small_config(1);
  bad.sensor_range_m = 0.5;
  CHECK_THROWS_AS(Simulator(sc, bad), std::invalid_argument);
  bad = small_config(0);
  CHECK_THROWS_AS(Simulator(sc, bad), std::invalid_argument);
  bad = small_config(1);
  bad.occupancy_threshold = 1.0;
  CHECK_THROWS_AS(Simulator(sc, bad), std::invalid_argument);
}

TEST_CASE("identical inputs give identical traces") {
  const auto sc = testing::random_connected_scenario(16, 16, 0.2, 2.0, 9);
  for (auto variant : {PlannerVariant::Full, PlannerVariant::WithoutCA, PlannerVariant::WithoutGT}) {
    SimulationConfig c;
    c.robots = 3;
    c.variant = variant;
    c.seed = 4;
    const auto a = Simulator(sc, c).run();
    const auto b = Simulator(sc, c).run();
    CHECK(format_trace(a.trace, sc.tiling) == format_trace(b.trace, sc.tiling));
    CHECK(a.metrics.total_path_length_m == b.metrics.total_path_length_m);
  }
}

TEST_CASE("metrics agree with the trace and the visit counts") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto sc = testing::random_connected_scenario(14, 14, 0.2, 2.0, 100 + seed);
    SimulationConfig c;
    c.robots = 1 + static_cast<int>(seed % 3);
    c.seed = seed;
    const auto res = Simulator(sc, c).run();
    CHECK(trace_path_length(res.trace, sc.tiling) ==
          doctest::Approx(res.metrics.total_path_length_m));

    // Recount visits and coverage from the trace.
    std::vector<int> visits(static_cast<std::size_t>(sc.tiling.cell_count()), 0);
    for (auto cell : res.trace.front().robot_cells) ++visits[static_cast<std::size_t>(cell)];
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
      for (std::size_t r = 0; r < res.trace[k].robot_cells.size(); ++r) {
        if (res.trace[k].robot_cells[r] != res.trace[k - 1].robot_cells[r]) {
          ++visits[static_cast<std::size_t>(res.trace[k].robot_cells[r])];
        }
      }
    }
    CHECK(visits == res.visits);
    long repeats = 0;
    int distinct = 0;
    for (auto v : visits) {
      repeats += std::max(v - 1, 0);
      distinct += v > 0 ? 1 : 0;
    }
    CHECK(res.metrics.overlap_ratio ==
          doctest::Approx(static_cast<double>(repeats) / res.metrics.reachable_free_cells));
    CHECK(distinct == res.trace.back().covered);
    CHECK(res.metrics.complete);
    CHECK(res.metrics.coverage_time == res.trace.back().tick);
  }
}

TEST_CASE("coverage never shrinks and robots stay apart") {
  const auto sc = testing::random_connected_scenario(18, 18, 0.22, 2.0, 31);
  SimulationConfig c;
  c.robots = 3;
  c.seed = 2;
  const auto res = Simulator(sc, c).run();
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    CHECK(res.trace[k].covered >= res.trace[k - 1].covered);
    const auto& cells = res.trace[k].robot_cells;
    CHECK(std::set<CellIndex>(cells.begin(), cells.end()).size() == cells.size());
    for (auto cell : cells) CHECK(sc.truth[static_cast<std::size_t>(cell)] == Occupancy::Free);
  }
  CHECK(res.safety.same_cell_events == 0);
  CHECK(res.safety.obstacle_entries == 0);
}

TEST_CASE("replan policy fires on any event") {
  TickEvents e;
  CHECK_FALSE(replan_policy(e));
  for (int k = 0; k < 6; ++k) {
    TickEvents f;
    (k == 0 ? f.initial
     : k == 1 ? f.target_completed
     : k == 2 ? f.target_lost
     : k == 3 ? f.split_in_tour
     : k == 4 ? f.candidate_reachable
              : f.idle_with_new_candidates) = true;
    CHECK(replan_policy(f));
  }
}

TEST_CASE("the full planner follows tsp plans with exits") {
  const auto sc = open_scenario(12, 12, 1.0);
  SimulationConfig c;
  c.robots = 2;
  c.sensor_range_m = 4.0;
  c.subarea_size_m = 3.0;
  const auto res = Simulator(sc, c).run();
  CHECK(res.metrics.complete);
  bool saw_tsp = false;
  for (const auto& rec : res.trace) {
    for (const auto& e : rec.events) saw_tsp = saw_tsp || e.rfind("tsp ", 0) == 0;
  }
  CHECK(saw_tsp);
  CHECK_FALSE(res.exit_plans.empty());
  for (const auto& p : res.exit_plans) {
    if (p.end != PlanEnd::Completed) continue;
    CHECK(p.executed.back() == p.exit);
    CHECK(p.last_in_subarea() == p.exit);
  }
}

TEST_CASE("stepping manually stops once the run is over") {
  const auto sc = open_scenario(3, 3);
  Simulator sim(sc, small_config(1));
  int steps = 0;
  while (sim.step()) ++steps;
  CHECK(sim.finished());
  CHECK_FALSE(sim.step());
  CHECK(sim.tick() == sim.result().metrics.coverage_time);
  CHECK(steps < 50);
}

TEST_CASE("the step budget ends a run early") {
  const auto sc = open_scenario(10, 10);
  SimulationConfig c = small_config(1);
  c.step_budget = 5;
  const auto res = Simulator(sc, c).run();
  CHECK(res.metrics.budget_exhausted);
  CHECK_FALSE(res.metrics.complete);
  CHECK(res.trace.back().tick == 5);
}
