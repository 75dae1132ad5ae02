#include "multicap/local_planner.hpp"

#include <algorithm>

#include "multicap/path_search.hpp"

namespace multicap {
namespace {

bool in_sorted(std::span<const CellIndex> cells, CellIndex c) {
  return std::binary_search(cells.begin(), cells.end(), c);
}

bool is_blocked(std::span<const CellIndex> blocked, CellIndex c) {
  return std::find(blocked.begin(), blocked.end(), c) != blocked.end();
}

}  // namespace

LocalStep sweep_step(const SymbolicMap& map, std::span<const CellIndex> subarea,
                     CellIndex robot, std::span<const CellIndex> blocked) {
  const auto& t = map.tiling();
  const Traversable open = [&](CellIndex c) {
    return !map.is_obstacle(c) && !is_blocked(blocked, c);
  };
  const auto p = t.coord(robot);
  for (const auto& d : kSweepOrder) {
    const GridCoord q{p.row + d[0], p.col + d[1]};
    if (!t.contains(q)) continue;
    const auto c = t.index(q);
    if (map.label(c) != CellLabel::UncoveredFree || !in_sorted(subarea, c)) continue;
    if (step_allowed(t, robot, c, open)) return LocalStep::cover(c);
  }

  bool pending = false;
  for (auto c : subarea) {
    const auto l = map.label(c);
    if (l == CellLabel::UncoveredFree || l == CellLabel::Unknown) {
      pending = true;
      break;
    }
  }
  if (!pending) return LocalStep::done();

  auto towards = [&](CellLabel wanted) -> std::optional<CellIndex> {
    auto path = nearest_path(
        map, robot,
        [&](CellIndex c) { return c != robot && map.label(c) == wanted && in_sorted(subarea, c); },
        blocked);
    if (!path || path->cells.size() < 2) return std::nullopt;
    return path->cells[1];
  };
  if (auto next = towards(CellLabel::UncoveredFree)) return LocalStep::move(*next);
  if (auto next = towards(CellLabel::Unknown)) return LocalStep::move(*next);
  return LocalStep::done(true);
}

TspInstance build_tsp_instance(const SymbolicMap& map, std::span<const CellIndex> subarea,
                               CellIndex start, std::optional<CellIndex> exit,
                               std::span<const CellIndex> blocked) {
  if (exit && *exit == start) exit.reset();
  TspInstance inst;
  inst.cells.push_back(start);
  for (auto c : subarea) {
    if (c == start || (exit && c == *exit)) continue;
    if (map.label(c) == CellLabel::UncoveredFree) inst.cells.push_back(c);
  }
  if (exit) {
    inst.cells.push_back(*exit);
    inst.has_exit = true;
  }

  const auto n = inst.cells.size();
  inst.costs = CostMatrix(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto field = distance_field_to(map, inst.cells[i], inst.cells, blocked);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      inst.costs.set(i, j, field.dist[static_cast<std::size_t>(inst.cells[j])]);
    }
  }
  const auto dummy = inst.dummy();
  for (std::size_t i = 0; i < n; ++i) {
    const bool anchored = i == 0 || (inst.has_exit && i == n - 1) || !inst.has_exit;
    inst.costs.set_symmetric(dummy, i, anchored ? 0.0 : kInf);
  }
  return inst;
}

std::vector<std::size_t> solve_tsp_instance(const TspInstance& inst,
                                            const SolverOptions& options) {
  const auto n = inst.cells.size();
  const std::size_t last_free = inst.has_exit ? n - 1 : n;
  for (std::size_t j = 1; j < n; ++j) {
    if (!(inst.costs.at(0, j) < kInf)) {
      throw UnreachableCellError("coverage cell " + std::to_string(inst.cells[j]) +
                                 " unreachable from " + std::to_string(inst.cells[0]));
    }
  }

  // Cycle: dummy, start, nearest-neighbour order..., exit.
  std::vector<std::size_t> cycle{inst.dummy(), 0};
  std::vector<char> used(n, 0);
  used[0] = 1;
  for (std::size_t step = 1; step < last_free; ++step) {
    const auto tail = cycle.back();
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t j = 1; j < last_free; ++j) {
      if (used[j]) continue;
      const double d = inst.costs.at(tail, j);
      if (best == 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    used[best] = 1;
    cycle.push_back(best);
  }
  if (inst.has_exit && n > 1) cycle.push_back(n - 1);

  vrp::two_opt(cycle, inst.costs, 2, true, options);
  return {cycle.begin() + 1, cycle.end()};
}

std::vector<CellIndex> plan_tsp_coverage(const SymbolicMap& map,
                                         std::span<const CellIndex> subarea, CellIndex start,
                                         std::optional<CellIndex> exit,
                                         std::span<const CellIndex> blocked) {
  const auto inst = build_tsp_instance(map, subarea, start, exit, blocked);
  const auto order = solve_tsp_instance(inst);
  std::vector<CellIndex> path{start};
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto from = inst.cells[order[k - 1]];
    const auto to = inst.cells[order[k]];
    const std::vector<CellIndex> goal{to};
    const auto leg = distance_field_to(map, from, goal, blocked).path_to(to);
    if (leg.empty()) {
      throw UnreachableCellError("no path from " + std::to_string(from) + " to " +
                                 std::to_string(to));
    }
    path.insert(path.end(), leg.begin() + 1, leg.end());
  }
  return path;
}

std::optional<CellIndex> select_exit_cell(const AdjacencyGraph& graph, const SymbolicMap& map,
                                          NodeId current, std::optional<NodeId> next) {
  if (!next) return std::nullopt;
  const auto* edge = graph.edge(current, *next);
  if (edge == nullptr || edge->path.empty()) return std::nullopt;
  const auto& here = graph.node(current);
  const auto& there = graph.node(*next);
  const auto& t = map.tiling();

  std::vector<CellIndex> path = edge->path;
  if (edge->a != current) std::reverse(path.begin(), path.end());

  std::optional<CellIndex> exit;
  for (auto c : path) {
    if (!here.contains(c) || map.is_obstacle(c)) continue;
    const auto p = t.coord(c);
    bool touches = false;
    for (int dr = -1; dr <= 1 && !touches; ++dr) {
      for (int dc = -1; dc <= 1 && !touches; ++dc) {
        const GridCoord q{p.row + dr, p.col + dc};
        if ((dr || dc) && t.contains(q) && there.contains(t.index(q))) touches = true;
      }
    }
    if (touches) exit = c;
  }
  return exit;
}

}  // namespace multicap
