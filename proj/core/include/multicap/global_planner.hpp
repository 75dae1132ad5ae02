#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "multicap/adjacency_graph.hpp"
#include "multicap/grid_map.hpp"
#include "multicap/path_search.hpp"

namespace multicap {

using RobotId = int;

struct RobotEntry {
  RobotId id = -1;
  CellIndex cell = kNoCell;
};

// Index layout: [0, M') robot positions, [M', |N|) candidate nodes, and the
// virtual depot at |N|.
struct AugmentedNodeSet {
  std::vector<RobotEntry> robots;
  std::vector<NodeId> candidates;

  std::size_t size() const { return robots.size() + candidates.size(); }
  std::size_t depot_index() const { return size(); }
  std::size_t candidate_index(std::size_t k) const { return robots.size() + k; }
};

// Dense square matrix of traversal costs in meters; kInf marks "no route".
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) { w_[i * n_ + j] = v; }
  void set_symmetric(std::size_t i, std::size_t j, double v) {
    set(i, j, v);
    set(j, i, v);
  }

  // Whitespace-separated rows, "inf" for kInf.
  std::string format() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

// Reuses single-source distance fields until the map gains an obstacle.
// One cache per map.
class DistanceCache {
 public:
  const DistanceField& field(const SymbolicMap& map, CellIndex source);
  void clear() { fields_.clear(); }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  struct Entry {
    std::size_t version = 0;
    DistanceField field;
  };
  std::unordered_map<CellIndex, Entry> fields_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

enum class CostMetric { PathLength, CenterDistance };

struct CostOptions {
  CostMetric metric = CostMetric::PathLength;
  // Nodes held by robots that are not available for reassignment.
  std::vector<NodeId> excluded;
  DistanceCache* cache = nullptr;
};

// Candidates are the non-covered nodes (minus `excluded`), ascending by id.
std::pair<AugmentedNodeSet, CostMatrix> build_cost_matrix(
    const AdjacencyGraph& graph, const SymbolicMap& map, std::span<const RobotEntry> robots,
    const CostOptions& options = {});

struct SolverOptions {
  int max_passes = 50;
  int swap_budget_factor = 10;  // swaps evaluated per pass: factor * K^2
};

struct Tour {
  RobotId robot = -1;
  std::vector<NodeId> nodes;  // open route, robot position and depot stripped
  double cost_m = 0.0;
};

struct Solution {
  std::vector<Tour> tours;           // one per robot entry, same order
  std::vector<NodeId> unassigned;    // unreachable from every robot
  double total_cost = 0.0;           // after 2-opt
  double greedy_cost = 0.0;          // after the nearest-neighbour stage
};

Solution solve_open_mdvrp(const AugmentedNodeSet& aug, const CostMatrix& w,
                          const SolverOptions& options = {});

// Head of the robot's tour. Throws std::out_of_range for an unknown robot.
std::optional<NodeId> next_target(const Solution& solution, RobotId robot);

namespace vrp {

// Sum of consecutive costs along an open route of matrix indices.
double route_cost(const CostMatrix& w, std::span<const std::size_t> route);

// Nearest-neighbour stage: repeatedly appends the globally cheapest
// (route tail, unassigned candidate) pair. Ties prefer the lower candidate
// index, then the lower robot index. Each route starts with its robot index.
std::vector<std::vector<std::size_t>> greedy_routes(const CostMatrix& w, std::size_t robots,
                                                    std::size_t candidates,
                                                    std::vector<std::size_t>* unassigned);

struct TwoOptStats {
  std::vector<double> pass_costs;  // cost after each pass
  long evaluations = 0;
};

// Segment-reversal local search on `route`. Positions before `first_movable`
// stay put. With `closed`, the route is a cycle (last -> route[0] counts);
// otherwise its tail is free. Returns the final cost.
double two_opt(std::vector<std::size_t>& route, const CostMatrix& w,
               std::size_t first_movable, bool closed, const SolverOptions& options,
               TwoOptStats* stats = nullptr);

}  // namespace vrp
}  // namespace multicap
