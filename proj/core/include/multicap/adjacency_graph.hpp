#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "multicap/grid_map.hpp"

namespace multicap {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

// Coverage status of a subarea: Covered (Cl), Explored (Op: no unknown
// cells, something left to cover) and Exploring (Op-bar: unknown cells left).
enum class NodeState : std::uint8_t { Covered, Explored, Exploring };

const char* to_string(NodeState state);

// ConnectivityAware keeps every subarea a connected component of its origin
// coarse cell and splits it when obstacles fragment it. Uniform keeps the
// coarse cells as-is and links them by grid proximity only.
enum class Decomposition : std::uint8_t { ConnectivityAware, Uniform };

struct GraphNode {
  NodeId id = kNoNode;
  std::vector<CellIndex> subarea;  // sorted, never contains Obstacle cells
  CellIndex center = kNoCell;
  NodeState state = NodeState::Exploring;
  int origin = -1;  // index of the coarse cell this node descends from

  bool contains(CellIndex c) const;
};

using EdgeKey = std::pair<NodeId, NodeId>;  // first < second

struct GraphEdge {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  std::vector<CellIndex> path;  // center(a) -> center(b); empty if none exists
  double length_m = 0.0;
};

struct RefinementReport {
  std::vector<NodeId> removed_nodes;
  std::vector<NodeId> created_nodes;
  std::vector<std::pair<NodeId, std::vector<NodeId>>> splits;
  std::vector<NodeId> updated_nodes;  // kept, with a new subarea or state
  std::vector<EdgeKey> removed_edges;
  std::vector<EdgeKey> added_edges;
  std::vector<EdgeKey> rerouted_edges;

  bool empty() const {
    return removed_nodes.empty() && created_nodes.empty() && updated_nodes.empty() &&
           removed_edges.empty() && added_edges.empty() && rerouted_edges.empty();
  }
};

NodeState node_state_of(std::span<const CellIndex> subarea, const SymbolicMap& map);

// Subarea cell closest to the cell centroid; ties go to the lower index.
CellIndex recompute_center(std::span<const CellIndex> subarea, const Tiling& tiling);

class AdjacencyGraph {
 public:
  // Partitions the map into coarse square blocks of `subarea_size_cells`
  // (trailing blocks are truncated). Throws std::invalid_argument when the
  // size is < 1 or exceeds both map dimensions.
  static AdjacencyGraph initialize(const SymbolicMap& map, int subarea_size_cells,
                                   Decomposition mode = Decomposition::ConnectivityAware);

  // Incorporates the cells relabeled by SymbolicMap::apply_observation.
  RefinementReport refine(const SymbolicMap& map, std::span<const CellIndex> changed);

  // Recomputes the state of nodes owning `cells` (e.g. after coverage).
  // Returns the nodes whose state changed, ascending.
  std::vector<NodeId> refresh_states(const SymbolicMap& map,
                                     std::span<const CellIndex> cells);

  const std::map<NodeId, GraphNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, GraphEdge>& edges() const { return edges_; }
  const GraphNode* find(NodeId id) const;
  const GraphNode& node(NodeId id) const;
  const GraphEdge* edge(NodeId a, NodeId b) const;
  std::vector<NodeId> neighbors(NodeId id) const;

  // Node whose subarea holds the cell, or kNoNode for obstacle cells.
  NodeId owner(CellIndex c) const { return owner_[static_cast<std::size_t>(c)]; }

  Decomposition mode() const { return mode_; }
  int subarea_size_cells() const { return block_; }
  int coarse_rows() const { return coarse_rows_; }
  int coarse_cols() const { return coarse_cols_; }
  int origin_of_cell(CellIndex c) const;
  std::vector<CellIndex> origin_region(int origin) const;

  // NODE id state center_row center_col size / EDGE id1 id2 length, by id.
  std::string dump() const;

 private:
  AdjacencyGraph(const Tiling& tiling, int block, Decomposition mode);

  NodeId add_node(const SymbolicMap& map, std::vector<CellIndex> cells, int origin);
  void remove_node(NodeId id, RefinementReport& report);
  void remove_edge(const EdgeKey& key);
  void route_edge(const SymbolicMap& map, GraphEdge& edge) const;
  void link(const SymbolicMap& map, NodeId a, NodeId b);
  std::set<NodeId> touching_nodes(const GraphNode& node) const;
  void relink(const SymbolicMap& map, NodeId id, bool center_moved,
              RefinementReport& report);

  RefinementReport refine_connectivity_aware(const SymbolicMap& map,
                                             std::span<const CellIndex> changed);
  RefinementReport refine_uniform(const SymbolicMap& map,
                                  std::span<const CellIndex> changed);

  Tiling tiling_;
  int block_;
  Decomposition mode_;
  int coarse_rows_;
  int coarse_cols_;
  std::map<NodeId, GraphNode> nodes_;
  std::map<EdgeKey, GraphEdge> edges_;
  std::map<NodeId, std::set<NodeId>> adjacency_;
  std::vector<NodeId> owner_;
  NodeId next_id_ = 0;
};

}  // namespace multicap
