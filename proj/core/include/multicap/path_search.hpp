#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "multicap/grid_map.hpp"

namespace multicap {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kSqrt2 = 1.41421356237309504880;

using Traversable = std::function<bool(CellIndex)>;

// Everything that is not labeled Obstacle; Unknown cells are assumed free.
Traversable optimistic_traversable(const SymbolicMap& map);

// Path over cells; cost is in cell units (1 per cardinal step, sqrt(2) per
// diagonal). Multiply by the cell size for meters.
struct CellPath {
  std::vector<CellIndex> cells;
  double cost = 0.0;
};

// True if `to` is an 8-neighbour of `from`, `to` is traversable, and a
// diagonal step does not cut a corner (both flanking cardinal cells must be
// traversable).
bool step_allowed(const Tiling& tiling, CellIndex from, CellIndex to,
                  const Traversable& traversable);

// 1 for a cardinal step, sqrt(2) for a diagonal one. Inputs must be 8-adjacent.
double step_cost(const Tiling& tiling, CellIndex a, CellIndex b);

bool eight_adjacent(const Tiling& tiling, CellIndex a, CellIndex b);

// A* under 8-connected motion with the corner-cutting rule. The start cell
// need not be traversable; every other cell on the path is.
std::optional<CellPath> shortest_cell_path(const SymbolicMap& map, CellIndex from,
                                           CellIndex to, const Traversable& traversable);

// Single-source distances over non-obstacle cells, skipping `blocked` cells.
struct DistanceField {
  CellIndex source = kNoCell;
  std::vector<double> dist;
  std::vector<CellIndex> parent;

  bool reachable(CellIndex c) const { return dist[static_cast<std::size_t>(c)] < kInf; }
  // Source-to-c path, or empty when unreachable.
  std::vector<CellIndex> path_to(CellIndex c) const;
};

DistanceField distance_field(const SymbolicMap& map, CellIndex source,
                             std::span<const CellIndex> blocked = {});

// Same search, stopped once every target is settled. Cells that were not
// settled by then read as unreachable.
DistanceField distance_field_to(const SymbolicMap& map, CellIndex source,
                                std::span<const CellIndex> targets,
                                std::span<const CellIndex> blocked = {});

// Dijkstra from `source` until the first cell accepted by `goal` is settled;
// ties settle in ascending cell order. Uses the same traversal rule as
// distance_field.
std::optional<CellPath> nearest_path(const SymbolicMap& map, CellIndex source,
                                     const std::function<bool(CellIndex)>& goal,
                                     std::span<const CellIndex> blocked = {});

}  // namespace multicap
