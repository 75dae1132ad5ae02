#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "multicap/local_planner.hpp"
#include "multicap/path_search.hpp"
#include "test_support.hpp"

using namespace multicap;

namespace {

SymbolicMap known_map(int w, int h, const std::vector<CellIndex>& walls = {}) {
  std::vector<Occupancy> truth(static_cast<std::size_t>(w * h), Occupancy::Free);
  for (auto c : walls) truth[static_cast<std::size_t>(c)] = Occupancy::Obstacle;
  SymbolicMap map(Tiling(w, h, 1.0), truth);
  testing::reveal_all(map);
  return map;
}

std::vector<CellIndex> all_cells(const SymbolicMap& map) {
  std::vector<CellIndex> cells(static_cast<std::size_t>(map.tiling().cell_count()));
  std::iota(cells.begin(), cells.end(), 0);
  return cells;
}

// Drives sweep_step until Done; returns the cells the robot occupied.
std::vector<CellIndex> drive_sweep(SymbolicMap& map, const std::vector<CellIndex>& subarea,
                                   CellIndex start) {
  std::vector<CellIndex> path{start};
  if (map.label(start) == CellLabel::UncoveredFree) map.mark_covered(start);
  for (int guard = 0; guard < 10000; ++guard) {
    const auto s = sweep_step(map, subarea, path.back());
    if (s.kind == LocalStep::Kind::Done) break;
    path.push_back(s.cell);
    if (map.label(s.cell) == CellLabel::UncoveredFree) map.mark_covered(s.cell);
  }
  return path;
}

}  // namespace

TEST_CASE("sweep on an open 10x10 subarea runs column by column") {
  auto map = known_map(10, 10);
  const auto sub = all_cells(map);
  const auto path = drive_sweep(map, sub, 0);
  CHECK(path.size() == 100);
  CHECK(map.count(CellLabel::UncoveredFree) == 0);
  const auto& t = map.tiling();
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto a = t.coord(path[k - 1]);
    const auto b = t.coord(path[k]);
    CHECK(b.col >= a.col);
    CHECK(std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1);
  }
  // Alternating column direction.
  CHECK(t.coord(path[9]) == GridCoord{9, 0});
  CHECK(t.coord(path[10]) == GridCoord{9, 1});
  CHECK(t.coord(path[19]) == GridCoord{0, 1});
}

TEST_CASE("sweep prefers left, up, down, right among uncovered neighbours") {
  auto map = known_map(3, 3);
  map.mark_covered(4);
  const auto sub = all_cells(map);
  CHECK(sweep_step(map, sub, 4) == LocalStep::cover(3));
  map.mark_covered(3);
  CHECK(sweep_step(map, sub, 4) == LocalStep::cover(1));
  map.mark_covered(1);
  CHECK(sweep_step(map, sub, 4) == LocalStep::cover(7));
  map.mark_covered(7);
  CHECK(sweep_step(map, sub, 4) == LocalStep::cover(5));
  map.mark_covered(5);
  CHECK(sweep_step(map, sub, 4) == LocalStep::cover(0));
}

TEST_CASE("sweep heads for the nearest uncovered cell when surrounded by covered ones") {
  auto map = known_map(5, 1);
  const auto sub = all_cells(map);
  for (CellIndex c = 0; c < 4; ++c) map.mark_covered(c);
  CHECK(sweep_step(map, sub, 0) == LocalStep::move(1));
  map.mark_covered(4);
  CHECK(sweep_step(map, sub, 0) == LocalStep::done());
}

TEST_CASE("sweep reports a remainder it cannot reach") {
  auto map = known_map(3, 1, {1});
  const auto sub = all_cells(map);
  map.mark_covered(0);
  CHECK(sweep_step(map, sub, 0) == LocalStep::done(true));
  // Another robot in the way blocks the route too.
  auto open = known_map(3, 1);
  open.mark_covered(0);
  open.mark_covered(1);
  CHECK(sweep_step(open, sub, 0, std::vector<CellIndex>{1}) == LocalStep::done(true));
  CHECK(sweep_step(open, sub, 0) == LocalStep::move(1));
}

TEST_CASE("sweep observes unknown cells of its subarea") {
  SymbolicMap map(Tiling(3, 1, 1.0), std::vector<Occupancy>(3, Occupancy::Free));
  const std::vector<Observation> seen{Observation::free(0), Observation::free(1)};
  map.apply_observation(seen);
  map.mark_covered(0);
  map.mark_covered(1);
  const auto sub = all_cells(map);
  CHECK(sweep_step(map, sub, 0) == LocalStep::move(1));
}

TEST_CASE("tsp instance puts the start first and the exit last") {
  auto map = known_map(3, 3);
  const auto sub = all_cells(map);
  const auto inst = build_tsp_instance(map, sub, 0, CellIndex{8});
  CHECK(inst.cells.front() == 0);
  CHECK(inst.cells.back() == 8);
  CHECK(inst.has_exit);
  CHECK(inst.cells.size() == 9);
  CHECK(inst.costs.at(inst.dummy(), 0) == 0.0);
  CHECK(inst.costs.at(inst.dummy(), 8) == 0.0);
  CHECK(inst.costs.at(inst.dummy(), 4) == kInf);
  CHECK(inst.costs.at(0, 8) == doctest::Approx(2 * kSqrt2));

  const auto same = build_tsp_instance(map, sub, 0, CellIndex{0});
  CHECK_FALSE(same.has_exit);
  CHECK(same.costs.at(same.dummy(), 4) == 0.0);
}

TEST_CASE("coverage path visits every uncovered cell and ends on the exit") {
  auto map = known_map(4, 4, {5});
  const auto sub = all_cells(map);
  const auto path = plan_tsp_coverage(map, sub, 0, CellIndex{15});
  CHECK(path.front() == 0);
  CHECK(path.back() == 15);
  for (auto c : sub) {
    if (c == 5) continue;
    CHECK(std::find(path.begin(), path.end(), c) != path.end());
  }
  const Traversable open = optimistic_traversable(map);
  for (std::size_t k = 1; k < path.size(); ++k) {
    CHECK(step_allowed(map.tiling(), path[k - 1], path[k], open));
  }
}

TEST_CASE("unreachable coverage cell throws") {
  auto map = known_map(3, 1, {1});
  const auto sub = all_cells(map);
  CHECK_THROWS_AS(plan_tsp_coverage(map, sub, 0, std::nullopt), UnreachableCellError);
}

TEST_CASE("tsp order is never better than the exhaustive optimum and often equal") {
  std::mt19937_64 rng(77);
  int equal = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<CellIndex> walls;
    for (CellIndex c = 0; c < 36; ++c) {
      if (rng() % 6 == 0) walls.push_back(c);
    }
    auto map = known_map(6, 6, walls);
    auto comps = testing::union_find_components(map, all_cells(map));
    auto big = *std::max_element(comps.begin(), comps.end(),
                                 [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (big.size() < 3) continue;
    // Keep at most eight uncovered cells besides the start.
    std::shuffle(big.begin(), big.end(), rng);
    big.resize(std::min<std::size_t>(big.size(), 9));
    std::sort(big.begin(), big.end());
    for (auto c : all_cells(map)) {
      if (map.label(c) == CellLabel::UncoveredFree &&
          !std::binary_search(big.begin(), big.end(), c)) {
        map.mark_covered(c);
      }
    }
    const auto start = big[rng() % big.size()];
    std::optional<CellIndex> exit;
    if (rng() % 2) exit = big[rng() % big.size()];
    const auto inst = build_tsp_instance(map, big, start, exit);
    const auto order = solve_tsp_instance(inst);
    REQUIRE(order.size() == inst.cells.size());
    CHECK(order.front() == 0);
    if (inst.has_exit) CHECK(order.back() == inst.cells.size() - 1);
    double cost = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) cost += inst.costs.at(order[k - 1], order[k]);
    const double opt = testing::exhaustive_open_path(inst.costs, inst.cells.size(), inst.has_exit);
    CHECK(cost >= opt - 1e-9);
    if (cost <= opt + 1e-9) ++equal;
  }
  CHECK(equal >= trials / 2);
}

TEST_CASE("exit cell lies in the current subarea and touches the next one") {
  auto map = known_map(6, 3);
  const auto g = AdjacencyGraph::initialize(map, 3);
  REQUIRE(g.nodes().size() == 2);
  const auto exit = select_exit_cell(g, map, 0, NodeId{1});
  REQUIRE(exit.has_value());
  const auto& t = map.tiling();
  const auto& cur = g.node(0).subarea;
  CHECK(std::binary_search(cur.begin(), cur.end(), *exit));
  CHECK(t.coord(*exit).col == 2);
  CHECK_FALSE(select_exit_cell(g, map, 0, std::nullopt).has_value());

  auto far = known_map(9, 3);
  const auto g3 = AdjacencyGraph::initialize(far, 3);
  CHECK_FALSE(select_exit_cell(g3, far, 0, NodeId{2}).has_value());
}
