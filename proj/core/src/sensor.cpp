#include "multicap/sensor.hpp"

#include <cmath>
#include <cstdlib>

namespace multicap {

std::vector<CellIndex> supercover_line(const Tiling& tiling, CellIndex a, CellIndex b) {
  const auto p = tiling.coord(a);
  const auto q = tiling.coord(b);
  const int nx = std::abs(q.col - p.col);
  const int ny = std::abs(q.row - p.row);
  const int sx = q.col > p.col ? 1 : -1;
  const int sy = q.row > p.row ? 1 : -1;
  int x = p.col;
  int y = p.row;
  std::vector<CellIndex> cells{a};
  for (int ix = 0, iy = 0; ix < nx || iy < ny;) {
    // Sign of where the segment leaves the current cell: through a vertical
    // side (< 0), a horizontal side (> 0) or exactly a corner (0).
    const long decision = static_cast<long>(1 + 2 * ix) * ny - static_cast<long>(1 + 2 * iy) * nx;
    if (decision == 0) {
      cells.push_back(tiling.index({y, x + sx}));
      cells.push_back(tiling.index({y + sy, x}));
      x += sx;
      y += sy;
      ++ix;
      ++iy;
    } else if (decision < 0) {
      x += sx;
      ++ix;
    } else {
      y += sy;
      ++iy;
    }
    cells.push_back(tiling.index({y, x}));
  }
  return cells;
}

std::vector<CellIndex> visible_cells(const SymbolicMap& map, CellIndex origin,
                                     const SensorModel& sensor) {
  const auto& t = map.tiling();
  const double r = sensor.range_m / t.cell_size();
  const int reach = static_cast<int>(std::floor(r + 1e-9));
  const double r2 = r * r + 1e-9;
  const auto o = t.coord(origin);
  std::vector<CellIndex> out;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const GridCoord q{o.row + dr, o.col + dc};
      if (!t.contains(q) || dr * dr + dc * dc > r2) continue;
      const auto target = t.index(q);
      const auto ray = supercover_line(t, origin, target);
      bool clear = true;
      for (std::size_t k = 1; k + 1 < ray.size(); ++k) {
        if (map.truth(ray[k]) == Occupancy::Obstacle) {
          clear = false;
          break;
        }
      }
      if (clear) out.push_back(target);
    }
  }
  return out;
}

std::vector<Observation> sense(const SymbolicMap& map, CellIndex origin,
                               const SensorModel& sensor) {
  std::vector<Observation> out;
  for (auto c : visible_cells(map, origin, sensor)) {
    out.push_back(map.truth(c) == Occupancy::Obstacle ? Observation::obstacle(c)
                                                      : Observation::free(c));
  }
  return out;
}

}  // namespace multicap
