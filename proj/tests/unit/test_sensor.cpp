#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "multicap/sensor.hpp"

using namespace multicap;

namespace {

bool has(const std::vector<CellIndex>& v, CellIndex c) {
  return std::find(v.begin(), v.end(), c) != v.end();
}

SymbolicMap map_with(int w, int h, const std::vector<CellIndex>& walls, double cell = 1.0) {
  std::vector<Occupancy> truth(static_cast<std::size_t>(w * h), Occupancy::Free);
  for (auto c : walls) truth[static_cast<std::size_t>(c)] = Occupancy::Obstacle;
  return SymbolicMap(Tiling(w, h, cell), truth);
}

}  // namespace

TEST_CASE("supercover of axis-aligned and diagonal segments") {
  const Tiling t(5, 5, 1.0);
  CHECK(supercover_line(t, t.index({0, 0}), t.index({0, 3})) ==
        std::vector<CellIndex>{0, 1, 2, 3});
  CHECK(supercover_line(t, t.index({3, 2}), t.index({0, 2})) ==
        std::vector<CellIndex>{17, 12, 7, 2});
  // A pure diagonal passes through corners: both flanks are included.
  const auto diag = supercover_line(t, t.index({0, 0}), t.index({2, 2}));
  CHECK(diag.front() == 0);
  CHECK(diag.back() == 12);
  CHECK(has(diag, 6));
  CHECK(has(diag, 1));
  CHECK(has(diag, 5));
  CHECK(has(diag, 7));
  CHECK(has(diag, 11));
  CHECK(supercover_line(t, 4, 4) == std::vector<CellIndex>{4});
}

TEST_CASE("supercover steps are 8-adjacent and endpoints included") {
  const Tiling t(20, 20, 1.0);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    const CellIndex a = static_cast<CellIndex>(rng() % 400);
    const CellIndex b = static_cast<CellIndex>(rng() % 400);
    const auto line = supercover_line(t, a, b);
    CHECK(line.front() == a);
    CHECK(line.back() == b);
    for (std::size_t i = 1; i < line.size(); ++i) {
      const auto p = t.coord(line[i - 1]);
      const auto q = t.coord(line[i]);
      CHECK(std::max(std::abs(p.row - q.row), std::abs(p.col - q.col)) == 1);
    }
  }
}

TEST_CASE("walls occlude the cells behind them but are themselves seen") {
  // Wall across column 2 of a 5x5 map.
  auto map = map_with(5, 5, {2, 7, 12, 17, 22});
  const auto seen = visible_cells(map, map.tiling().index({2, 0}), SensorModel{10.0});
  CHECK(has(seen, 12));
  CHECK(has(seen, 7));
  CHECK_FALSE(has(seen, 13));
  CHECK_FALSE(has(seen, 14));
  CHECK(has(seen, 11));
}

TEST_CASE("diagonal rays are blocked by a single corner flank") {
  auto map = map_with(3, 3, {1});
  const auto seen = visible_cells(map, 0, SensorModel{10.0});
  CHECK_FALSE(has(seen, 8));
  CHECK_FALSE(has(seen, 4));
  CHECK(has(seen, 3));
  CHECK(has(seen, 1));
}

TEST_CASE("range limits the footprint; neighbours are always visible") {
  auto map = map_with(9, 9, {}, 2.0);
  const auto center = map.tiling().index({4, 4});
  const auto seen = visible_cells(map, center, SensorModel{2.0 * std::sqrt(2.0)});
  CHECK(seen.size() == 9);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) CHECK(has(seen, map.tiling().index({4 + dr, 4 + dc})));
  }
  const auto wide = visible_cells(map, center, SensorModel{4.0});
  CHECK(has(wide, map.tiling().index({4, 6})));
  CHECK_FALSE(has(wide, map.tiling().index({6, 6})));
}

TEST_CASE("sense reports ground truth as certain evidence") {
  auto map = map_with(3, 1, {2});
  const auto obs = sense(map, 0, SensorModel{5.0});
  REQUIRE(obs.size() == 3);
  for (const auto& o : obs) {
    CHECK(o.occupancy_probability == (o.cell == 2 ? 1.0 : 0.0));
  }
  map.apply_observation(obs);
  CHECK(map.label(2) == CellLabel::Obstacle);
  CHECK(map.label(1) == CellLabel::UncoveredFree);
}
