#include "multicap/adjacency_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "multicap/path_search.hpp"

namespace multicap {
namespace {

EdgeKey make_key(NodeId a, NodeId b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

bool path_blocked(const SymbolicMap& map, const std::vector<CellIndex>& path) {
  return std::any_of(path.begin(), path.end(),
                     [&](CellIndex c) { return map.is_obstacle(c); });
}

}  // namespace

const char* to_string(NodeState state) {
  switch (state) {
    case NodeState::Covered: return "Cl";
    case NodeState::Explored: return "Op";
    case NodeState::Exploring: return "OpBar";
  }
  return "?";
}

bool GraphNode::contains(CellIndex c) const {
  return std::binary_search(subarea.begin(), subarea.end(), c);
}

NodeState node_state_of(std::span<const CellIndex> subarea, const SymbolicMap& map) {
  bool any_uncovered = false;
  for (auto c : subarea) {
    switch (map.label(c)) {
      case CellLabel::Unknown: return NodeState::Exploring;
      case CellLabel::UncoveredFree: any_uncovered = true; break;
      default: break;
    }
  }
  return any_uncovered ? NodeState::Explored : NodeState::Covered;
}

CellIndex recompute_center(std::span<const CellIndex> subarea, const Tiling& tiling) {
  if (subarea.empty()) throw std::invalid_argument("empty subarea has no center");
  std::int64_t sum_r = 0;
  std::int64_t sum_c = 0;
  for (auto c : subarea) {
    const auto p = tiling.coord(c);
    sum_r += p.row;
    sum_c += p.col;
  }
  // Compare n^2 * squared distance to keep the centroid test exact.
  const auto n = static_cast<std::int64_t>(subarea.size());
  CellIndex best = kNoCell;
  std::int64_t best_d = 0;
  for (auto c : subarea) {
    const auto p = tiling.coord(c);
    const std::int64_t dr = n * p.row - sum_r;
    const std::int64_t dc = n * p.col - sum_c;
    const std::int64_t d = dr * dr + dc * dc;
    if (best == kNoCell || d < best_d || (d == best_d && c < best)) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

AdjacencyGraph::AdjacencyGraph(const Tiling& tiling, int block, Decomposition mode)
    : tiling_(tiling),
      block_(block),
      mode_(mode),
      coarse_rows_((tiling.height() + block - 1) / block),
      coarse_cols_((tiling.width() + block - 1) / block),
      owner_(static_cast<std::size_t>(tiling.cell_count()), kNoNode) {}

int AdjacencyGraph::origin_of_cell(CellIndex c) const {
  const auto p = tiling_.coord(c);
  return (p.row / block_) * coarse_cols_ + p.col / block_;
}

std::vector<CellIndex> AdjacencyGraph::origin_region(int origin) const {
  const int br = origin / coarse_cols_;
  const int bc = origin % coarse_cols_;
  std::vector<CellIndex> cells;
  for (int r = br * block_; r < std::min((br + 1) * block_, tiling_.height()); ++r) {
    for (int c = bc * block_; c < std::min((bc + 1) * block_, tiling_.width()); ++c) {
      cells.push_back(tiling_.index({r, c}));
    }
  }
  return cells;
}

AdjacencyGraph AdjacencyGraph::initialize(const SymbolicMap& map, int subarea_size_cells,
                                          Decomposition mode) {
  const auto& t = map.tiling();
  if (subarea_size_cells < 1) throw std::invalid_argument("subarea size must be >= 1 cell");
  if (subarea_size_cells > t.width() && subarea_size_cells > t.height()) {
    throw std::invalid_argument("subarea size exceeds both map dimensions");
  }
  AdjacencyGraph g(t, subarea_size_cells, mode);
  const int origins = g.coarse_rows_ * g.coarse_cols_;
  for (int o = 0; o < origins; ++o) {
    const auto region = g.origin_region(o);
    if (mode == Decomposition::ConnectivityAware) {
      for (auto& comp : connected_components(map, region).components) {
        g.add_node(map, std::move(comp), o);
      }
    } else {
      std::vector<CellIndex> cells;
      for (auto c : region) {
        if (!map.is_obstacle(c)) cells.push_back(c);
      }
      if (!cells.empty()) g.add_node(map, std::move(cells), o);
    }
  }

  if (mode == Decomposition::ConnectivityAware) {
    for (const auto& [id, node] : g.nodes_) {
      for (auto other : g.touching_nodes(node)) {
        if (other > id) g.link(map, id, other);
      }
    }
  } else {
    std::map<int, NodeId> by_origin;
    for (const auto& [id, node] : g.nodes_) by_origin[node.origin] = id;
    for (const auto& [origin, id] : by_origin) {
      const int r = origin / g.coarse_cols_;
      const int c = origin % g.coarse_cols_;
      if (c + 1 < g.coarse_cols_) {
        if (auto it = by_origin.find(origin + 1); it != by_origin.end()) g.link(map, id, it->second);
      }
      if (r + 1 < g.coarse_rows_) {
        if (auto it = by_origin.find(origin + g.coarse_cols_); it != by_origin.end()) {
          g.link(map, id, it->second);
        }
      }
    }
  }
  return g;
}

NodeId AdjacencyGraph::add_node(const SymbolicMap& map, std::vector<CellIndex> cells,
                                int origin) {
  std::sort(cells.begin(), cells.end());
  GraphNode node;
  node.id = next_id_++;
  node.center = recompute_center(cells, tiling_);
  node.state = node_state_of(cells, map);
  node.origin = origin;
  node.subarea = std::move(cells);
  for (auto c : node.subarea) owner_[static_cast<std::size_t>(c)] = node.id;
  adjacency_[node.id];
  const auto id = node.id;
  nodes_.emplace(id, std::move(node));
  return id;
}

void AdjacencyGraph::remove_edge(const EdgeKey& key) {
  edges_.erase(key);
  adjacency_[key.first].erase(key.second);
  adjacency_[key.second].erase(key.first);
}

void AdjacencyGraph::remove_node(NodeId id, RefinementReport& report) {
  const auto neighbours = adjacency_[id];
  for (auto n : neighbours) {
    const auto key = make_key(id, n);
    remove_edge(key);
    report.removed_edges.push_back(key);
  }
  adjacency_.erase(id);
  for (auto c : nodes_.at(id).subarea) {
    if (owner_[static_cast<std::size_t>(c)] == id) owner_[static_cast<std::size_t>(c)] = kNoNode;
  }
  nodes_.erase(id);
  report.removed_nodes.push_back(id);
}

void AdjacencyGraph::route_edge(const SymbolicMap& map, GraphEdge& edge) const {
  const auto from = nodes_.at(edge.a).center;
  const auto to = nodes_.at(edge.b).center;
  auto path = shortest_cell_path(map, from, to, optimistic_traversable(map));
  if (mode_ == Decomposition::Uniform) {
    // Proximity-only adjacency: the edge weight is the center distance even
    // when the stored path has to detour or does not exist.
    const auto [ax, ay] = tiling_.center_m(from);
    const auto [bx, by] = tiling_.center_m(to);
    edge.length_m = std::hypot(ax - bx, ay - by);
    edge.path = path ? std::move(path->cells) : std::vector<CellIndex>{};
    return;
  }
  if (path) {
    edge.path = std::move(path->cells);
    edge.length_m = path->cost * tiling_.cell_size();
  } else {
    edge.path.clear();
    edge.length_m = kInf;
  }
}

void AdjacencyGraph::link(const SymbolicMap& map, NodeId a, NodeId b) {
  const auto key = make_key(a, b);
  GraphEdge edge{key.first, key.second, {}, 0.0};
  route_edge(map, edge);
  edges_[key] = std::move(edge);
  adjacency_[a].insert(b);
  adjacency_[b].insert(a);
}

std::set<NodeId> AdjacencyGraph::touching_nodes(const GraphNode& node) const {
  std::set<NodeId> out;
  for (auto c : node.subarea) {
    for (auto n : cardinal_neighbors(tiling_, c)) {
      const auto o = owner_[static_cast<std::size_t>(n)];
      if (o != kNoNode && o != node.id) out.insert(o);
    }
  }
  return out;
}

void AdjacencyGraph::relink(const SymbolicMap& map, NodeId id, bool center_moved,
                            RefinementReport& report) {
  const auto touching = touching_nodes(nodes_.at(id));
  const auto current = adjacency_[id];
  for (auto n : current) {
    if (!touching.count(n)) {
      const auto key = make_key(id, n);
      remove_edge(key);
      report.removed_edges.push_back(key);
    }
  }
  for (auto n : touching) {
    const auto key = make_key(id, n);
    auto it = edges_.find(key);
    if (it == edges_.end()) {
      link(map, id, n);
      report.added_edges.push_back(key);
    } else if (center_moved || path_blocked(map, it->second.path)) {
      route_edge(map, it->second);
      report.rerouted_edges.push_back(key);
    }
  }
}

RefinementReport AdjacencyGraph::refine(const SymbolicMap& map,
                                        std::span<const CellIndex> changed) {
  if (changed.empty()) return {};
  return mode_ == Decomposition::ConnectivityAware ? refine_connectivity_aware(map, changed)
                                                   : refine_uniform(map, changed);
}

RefinementReport AdjacencyGraph::refine_connectivity_aware(
    const SymbolicMap& map, std::span<const CellIndex> changed) {
  RefinementReport report;
  std::set<NodeId> fragmented;  // nodes that gained obstacle cells
  std::set<NodeId> relabeled;   // nodes that only gained free cells
  bool any_obstacle = false;
  for (auto c : changed) {
    const auto o = owner_[static_cast<std::size_t>(c)];
    if (o == kNoNode) continue;
    if (map.is_obstacle(c)) {
      fragmented.insert(o);
      any_obstacle = true;
    } else {
      relabeled.insert(o);
    }
  }

  std::vector<std::pair<NodeId, bool>> dirty;  // (node, center moved)
  for (auto id : fragmented) {
    relabeled.erase(id);
    GraphNode& node = nodes_.at(id);
    std::vector<CellIndex> remaining;
    for (auto c : node.subarea) {
      if (map.is_obstacle(c)) {
        owner_[static_cast<std::size_t>(c)] = kNoNode;
      } else {
        remaining.push_back(c);
      }
    }
    auto parts = connected_components(map, remaining).components;
    if (parts.empty()) {
      remove_node(id, report);
    } else if (parts.size() == 1) {
      node.subarea = std::move(parts.front());
      const auto center = recompute_center(node.subarea, tiling_);
      const bool moved = center != node.center;
      node.center = center;
      node.state = node_state_of(node.subarea, map);
      report.updated_nodes.push_back(id);
      dirty.emplace_back(id, moved);
    } else {
      const int origin = node.origin;
      remove_node(id, report);
      std::vector<NodeId> created;
      for (auto& part : parts) {
        const auto nid = add_node(map, std::move(part), origin);
        created.push_back(nid);
        report.created_nodes.push_back(nid);
        dirty.emplace_back(nid, true);
      }
      report.splits.emplace_back(id, std::move(created));
    }
  }
  for (auto id : relabeled) {
    GraphNode& node = nodes_.at(id);
    const auto state = node_state_of(node.subarea, map);
    if (state != node.state) {
      node.state = state;
      report.updated_nodes.push_back(id);
    }
  }
  for (const auto& [id, moved] : dirty) relink(map, id, moved, report);

  if (any_obstacle) {
    std::vector<EdgeKey> blocked;
    for (const auto& [key, edge] : edges_) {
      if (path_blocked(map, edge.path)) blocked.push_back(key);
    }
    for (const auto& key : blocked) {
      auto& edge = edges_.at(key);
      route_edge(map, edge);
      if (edge.path.empty()) {
        remove_edge(key);
        report.removed_edges.push_back(key);
      } else {
        report.rerouted_edges.push_back(key);
      }
    }
  }

  std::sort(report.updated_nodes.begin(), report.updated_nodes.end());
  std::sort(report.rerouted_edges.begin(), report.rerouted_edges.end());
  report.rerouted_edges.erase(
      std::unique(report.rerouted_edges.begin(), report.rerouted_edges.end()),
      report.rerouted_edges.end());
  return report;
}

RefinementReport AdjacencyGraph::refine_uniform(const SymbolicMap& map,
                                                std::span<const CellIndex> changed) {
  RefinementReport report;
  std::set<NodeId> touched;
  bool any_obstacle = false;
  for (auto c : changed) {
    const auto o = owner_[static_cast<std::size_t>(c)];
    if (o == kNoNode) continue;
    touched.insert(o);
    any_obstacle = any_obstacle || map.is_obstacle(c);
  }
  std::set<NodeId> moved;
  for (auto id : touched) {
    GraphNode& node = nodes_.at(id);
    std::vector<CellIndex> remaining;
    for (auto c : node.subarea) {
      if (map.is_obstacle(c)) {
        owner_[static_cast<std::size_t>(c)] = kNoNode;
      } else {
        remaining.push_back(c);
      }
    }
    if (remaining.empty()) {
      remove_node(id, report);
      continue;
    }
    const bool shrank = remaining.size() != node.subarea.size();
    node.subarea = std::move(remaining);
    if (map.is_obstacle(node.center)) {
      node.center = recompute_center(node.subarea, tiling_);
      moved.insert(id);
    }
    const auto state = node_state_of(node.subarea, map);
    if (shrank || state != node.state) report.updated_nodes.push_back(id);
    node.state = state;
  }
  if (any_obstacle) {
    for (auto& [key, edge] : edges_) {
      if (moved.count(key.first) || moved.count(key.second) || path_blocked(map, edge.path)) {
        route_edge(map, edge);
        report.rerouted_edges.push_back(key);
      }
    }
  }
  return report;
}

std::vector<NodeId> AdjacencyGraph::refresh_states(const SymbolicMap& map,
                                                   std::span<const CellIndex> cells) {
  std::set<NodeId> owners;
  for (auto c : cells) {
    const auto o = owner_[static_cast<std::size_t>(c)];
    if (o != kNoNode) owners.insert(o);
  }
  std::vector<NodeId> changed;
  for (auto id : owners) {
    auto& node = nodes_.at(id);
    const auto state = node_state_of(node.subarea, map);
    if (state != node.state) {
      node.state = state;
      changed.push_back(id);
    }
  }
  return changed;
}

const GraphNode* AdjacencyGraph::find(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const GraphNode& AdjacencyGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("no node " + std::to_string(id));
  return it->second;
}

const GraphEdge* AdjacencyGraph::edge(NodeId a, NodeId b) const {
  auto it = edges_.find(make_key(a, b));
  return it == edges_.end() ? nullptr : &it->second;
}

std::vector<NodeId> AdjacencyGraph::neighbors(NodeId id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::string AdjacencyGraph::dump() const {
  std::ostringstream out;
  char buf[128];
  for (const auto& [id, node] : nodes_) {
    const auto p = tiling_.coord(node.center);
    std::snprintf(buf, sizeof(buf), "NODE %d %s %d %d %zu\n", id, to_string(node.state),
                  p.row, p.col, node.subarea.size());
    out << buf;
  }
  for (const auto& [key, edge] : edges_) {
    std::snprintf(buf, sizeof(buf), "EDGE %d %d %.3f\n", key.first, key.second,
                  edge.length_m);
    out << buf;
  }
  return out.str();
}

}  // namespace multicap
