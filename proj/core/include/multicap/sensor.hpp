#pragma once

#include <vector>

#include "multicap/grid_map.hpp"

namespace multicap {

// Line-of-sight range sensor over the ground truth.
struct SensorModel {
  double range_m = 12.0;
};

// Supercover traversal from the center of `a` to the center of `b`,
// endpoints included. When the segment passes exactly through a cell corner
// both flanking cells are emitted.
std::vector<CellIndex> supercover_line(const Tiling& tiling, CellIndex a, CellIndex b);

// Cells whose centers lie within range of the origin's center and have no
// ground-truth obstacle strictly between along the supercover ray.
std::vector<CellIndex> visible_cells(const SymbolicMap& map, CellIndex origin,
                                     const SensorModel& sensor);

// Deterministic evidence for the visible cells (probability 0 or 1).
std::vector<Observation> sense(const SymbolicMap& map, CellIndex origin,
                               const SensorModel& sensor);

}  // namespace multicap
