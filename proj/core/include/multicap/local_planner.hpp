#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "multicap/adjacency_graph.hpp"
#include "multicap/global_planner.hpp"
#include "multicap/grid_map.hpp"

namespace multicap {

struct LocalStep {
  enum class Kind { Move, Cover, Done };

  Kind kind = Kind::Done;
  CellIndex cell = kNoCell;
  // Done while uncovered or unknown cells of the subarea are still left but
  // cannot be reached from the robot.
  bool remainder = false;

  static LocalStep move(CellIndex c) { return {Kind::Move, c, false}; }
  static LocalStep cover(CellIndex c) { return {Kind::Cover, c, false}; }
  static LocalStep done(bool remainder = false) { return {Kind::Done, kNoCell, remainder}; }

  bool operator==(const LocalStep&) const = default;
};

// Neighbour preference of the back-and-forth sweep: Left, Up, Down, Right,
// then Up-Left, Down-Left, Up-Right, Down-Right. Offsets are (drow, dcol).
inline constexpr int kSweepOrder[8][2] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1},
                                          {-1, -1}, {1, -1}, {-1, 1}, {1, 1}};

// One back-and-forth step inside an exploring subarea (sorted cell list).
// `blocked` cells (other robots) are treated as impassable. When no
// uncovered cell is left, the robot heads for the nearest unknown cell of
// the subarea so that it gets observed.
LocalStep sweep_step(const SymbolicMap& map, std::span<const CellIndex> subarea,
                     CellIndex robot, std::span<const CellIndex> blocked = {});

class UnreachableCellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Open-path TSP over the uncovered cells of a subarea. Index 0 is the start,
// the exit (if any) is last, and `dummy()` is the synthetic node tying the
// two ends together.
struct TspInstance {
  std::vector<CellIndex> cells;
  bool has_exit = false;
  CostMatrix costs;  // (cells.size() + 1)^2, cell units, last index is the dummy

  std::size_t dummy() const { return cells.size(); }
};

TspInstance build_tsp_instance(const SymbolicMap& map, std::span<const CellIndex> subarea,
                               CellIndex start, std::optional<CellIndex> exit,
                               std::span<const CellIndex> blocked = {});

// Nearest-neighbour construction followed by 2-opt on the dummy cycle.
// Returns indices into instance.cells: start first, exit last when present.
std::vector<std::size_t> solve_tsp_instance(const TspInstance& instance,
                                            const SolverOptions& options = {});

// Cell-by-cell coverage path from `start` through every uncovered cell of the
// subarea, ending at `exit` when given. Throws UnreachableCellError if a cell
// to visit cannot be reached.
std::vector<CellIndex> plan_tsp_coverage(const SymbolicMap& map,
                                         std::span<const CellIndex> subarea, CellIndex start,
                                         std::optional<CellIndex> exit,
                                         std::span<const CellIndex> blocked = {});

// Last cell of the current->next transition path that lies in the current
// subarea and touches (8-adjacent) the next subarea. nullopt when there is no
// next node, the nodes are not adjacent, or no such cell exists.
std::optional<CellIndex> select_exit_cell(const AdjacencyGraph& graph, const SymbolicMap& map,
                                          NodeId current, std::optional<NodeId> next);

}  // namespace multicap
