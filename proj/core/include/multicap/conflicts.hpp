#pragma once

#include <span>
#include <vector>

#include "multicap/global_planner.hpp"
#include "multicap/grid_map.hpp"

namespace multicap {

// `to == from` means the robot stays put.
struct MoveProposal {
  RobotId robot = -1;
  CellIndex from = kNoCell;
  CellIndex to = kNoCell;
};

// Approved destination for every proposal, in input order. Lower robot ids
// win contested cells; the loser stays where it is. A mover whose target is
// occupied by a robot that ends up staying is held back too. After
// resolution no two robots share a cell and no pair swaps cells.
std::vector<CellIndex> resolve_conflicts(std::span<const MoveProposal> proposals);

}  // namespace multicap
