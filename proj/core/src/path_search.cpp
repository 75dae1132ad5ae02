#include "multicap/path_search.hpp"

#include <algorithm>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <utility>

namespace multicap {
namespace {

struct Offset {
  int dr;
  int dc;
};

constexpr Offset kMoves[8] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1},
                              {-1, -1}, {1, -1}, {-1, 1}, {1, 1}};

using QueueEntry = std::pair<double, CellIndex>;
using MinQueue =
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>>;

double octile(const Tiling& t, CellIndex a, CellIndex b) {
  const auto p = t.coord(a);
  const auto q = t.coord(b);
  const int dx = std::abs(p.col - q.col);
  const int dy = std::abs(p.row - q.row);
  const int lo = std::min(dx, dy);
  const int hi = std::max(dx, dy);
  return (hi - lo) + kSqrt2 * lo;
}

std::vector<CellIndex> unwind(const std::vector<CellIndex>& parent, CellIndex source,
                              CellIndex goal) {
  std::vector<CellIndex> path;
  for (CellIndex c = goal; c != kNoCell; c = parent[static_cast<std::size_t>(c)]) {
    path.push_back(c);
    if (c == source) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Expands the 8 moves from `c` that satisfy the motion rule under `open`.
template <typename Open, typename Visit>
void for_each_move(const Tiling& t, CellIndex c, const Open& open, const Visit& visit) {
  const auto p = t.coord(c);
  for (int k = 0; k < 8; ++k) {
    const GridCoord q{p.row + kMoves[k].dr, p.col + kMoves[k].dc};
    if (!t.contains(q)) continue;
    const auto n = t.index(q);
    if (!open(n)) continue;
    if (k >= 4) {
      if (!open(t.index({p.row + kMoves[k].dr, p.col})) ||
          !open(t.index({p.row, p.col + kMoves[k].dc}))) {
        continue;
      }
      visit(n, kSqrt2);
    } else {
      visit(n, 1.0);
    }
  }
}

// Non-obstacle cells minus `blocked`, one byte per cell.
std::vector<char> passable_cells(const SymbolicMap& map, std::span<const CellIndex> blocked) {
  const auto labels = map.labels();
  std::vector<char> open(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) open[c] = labels[c] != CellLabel::Obstacle;
  for (auto c : blocked) {
    if (map.tiling().contains(c)) open[static_cast<std::size_t>(c)] = 0;
  }
  return open;
}

template <typename Open, typename Goal>
std::optional<CellPath> dijkstra_until(const SymbolicMap& map, CellIndex source,
                                       const Open& open, const Goal& goal,
                                       DistanceField* field_out,
                                       std::vector<char>* settled_out = nullptr) {
  const auto& t = map.tiling();
  const auto n = static_cast<std::size_t>(t.cell_count());
  std::vector<double> dist(n, kInf);
  std::vector<CellIndex> parent(n, kNoCell);
  std::vector<char> done(n, 0);
  MinQueue queue;
  dist[static_cast<std::size_t>(source)] = 0.0;
  queue.emplace(0.0, source);
  std::optional<CellPath> found;
  while (!queue.empty()) {
    const auto [d, c] = queue.top();
    queue.pop();
    auto& settled = done[static_cast<std::size_t>(c)];
    if (settled) continue;
    settled = 1;
    if (goal(c)) {
      found = CellPath{unwind(parent, source, c), d};
      break;
    }
    for_each_move(t, c, open, [&](CellIndex m, double w) {
      const double nd = d + w;
      auto& slot = dist[static_cast<std::size_t>(m)];
      if (nd < slot) {
        slot = nd;
        parent[static_cast<std::size_t>(m)] = c;
        queue.emplace(nd, m);
      }
    });
  }
  if (field_out != nullptr) {
    field_out->source = source;
    field_out->dist = std::move(dist);
    field_out->parent = std::move(parent);
  }
  if (settled_out != nullptr) *settled_out = std::move(done);
  return found;
}

}  // namespace

Traversable optimistic_traversable(const SymbolicMap& map) {
  return [&map](CellIndex c) { return !map.is_obstacle(c); };
}

bool eight_adjacent(const Tiling& tiling, CellIndex a, CellIndex b) {
  const auto p = tiling.coord(a);
  const auto q = tiling.coord(b);
  return a != b && std::abs(p.row - q.row) <= 1 && std::abs(p.col - q.col) <= 1;
}

double step_cost(const Tiling& tiling, CellIndex a, CellIndex b) {
  const auto p = tiling.coord(a);
  const auto q = tiling.coord(b);
  return (p.row != q.row && p.col != q.col) ? kSqrt2 : 1.0;
}

bool step_allowed(const Tiling& tiling, CellIndex from, CellIndex to,
                  const Traversable& traversable) {
  if (!tiling.contains(from) || !tiling.contains(to)) return false;
  if (!eight_adjacent(tiling, from, to) || !traversable(to)) return false;
  const auto p = tiling.coord(from);
  const auto q = tiling.coord(to);
  if (p.row != q.row && p.col != q.col) {
    return traversable(tiling.index({q.row, p.col})) &&
           traversable(tiling.index({p.row, q.col}));
  }
  return true;
}

std::optional<CellPath> shortest_cell_path(const SymbolicMap& map, CellIndex from,
                                           CellIndex to, const Traversable& traversable) {
  const auto& t = map.tiling();
  if (!t.contains(from) || !t.contains(to)) {
    throw std::out_of_range("path endpoint outside the tiling");
  }
  if (from == to) return CellPath{{from}, 0.0};
  if (!traversable(to)) return std::nullopt;

  const auto n = static_cast<std::size_t>(t.cell_count());
  std::vector<double> g(n, kInf);
  std::vector<CellIndex> parent(n, kNoCell);
  std::vector<char> closed(n, 0);
  MinQueue open;
  g[static_cast<std::size_t>(from)] = 0.0;
  open.emplace(octile(t, from, to), from);
  while (!open.empty()) {
    const auto c = open.top().second;
    open.pop();
    auto& is_closed = closed[static_cast<std::size_t>(c)];
    if (is_closed) continue;
    is_closed = 1;
    if (c == to) return CellPath{unwind(parent, from, to), g[static_cast<std::size_t>(to)]};
    const double gc = g[static_cast<std::size_t>(c)];
    for_each_move(t, c, traversable, [&](CellIndex m, double w) {
      const double ng = gc + w;
      auto& slot = g[static_cast<std::size_t>(m)];
      if (ng < slot) {
        slot = ng;
        parent[static_cast<std::size_t>(m)] = c;
        open.emplace(ng + octile(t, m, to), m);
      }
    });
  }
  return std::nullopt;
}

std::vector<CellIndex> DistanceField::path_to(CellIndex c) const {
  if (!reachable(c)) return {};
  return unwind(parent, source, c);
}

DistanceField distance_field(const SymbolicMap& map, CellIndex source,
                             std::span<const CellIndex> blocked) {
  if (!map.tiling().contains(source)) throw std::out_of_range("source outside the tiling");
  const auto passable = passable_cells(map, blocked);
  auto open = [&](CellIndex c) { return passable[static_cast<std::size_t>(c)] != 0; };
  DistanceField field;
  dijkstra_until(map, source, open, [](CellIndex) { return false; }, &field);
  return field;
}

DistanceField distance_field_to(const SymbolicMap& map, CellIndex source,
                                std::span<const CellIndex> targets,
                                std::span<const CellIndex> blocked) {
  const auto& t = map.tiling();
  if (!t.contains(source)) throw std::out_of_range("source outside the tiling");
  const auto passable = passable_cells(map, blocked);
  auto open = [&](CellIndex c) { return passable[static_cast<std::size_t>(c)] != 0; };
  std::vector<char> wanted(static_cast<std::size_t>(t.cell_count()), 0);
  std::size_t left = 0;
  for (auto c : targets) {
    if (!t.contains(c)) throw std::out_of_range("target outside the tiling");
    auto& w = wanted[static_cast<std::size_t>(c)];
    if (!w) ++left;
    w = 1;
  }
  auto goal = [&](CellIndex c) {
    if (wanted[static_cast<std::size_t>(c)]) --left;
    return left == 0;
  };
  DistanceField field;
  std::vector<char> settled;
  dijkstra_until(map, source, open, goal, &field, &settled);
  for (std::size_t c = 0; c < settled.size(); ++c) {
    if (!settled[c]) {
      field.dist[c] = kInf;
      field.parent[c] = kNoCell;
    }
  }
  return field;
}

std::optional<CellPath> nearest_path(const SymbolicMap& map, CellIndex source,
                                     const std::function<bool(CellIndex)>& goal,
                                     std::span<const CellIndex> blocked) {
  if (!map.tiling().contains(source)) throw std::out_of_range("source outside the tiling");
  const auto passable = passable_cells(map, blocked);
  auto open = [&](CellIndex c) { return passable[static_cast<std::size_t>(c)] != 0; };
  return dijkstra_until(map, source, open, goal, nullptr);
}

}  // namespace multicap
