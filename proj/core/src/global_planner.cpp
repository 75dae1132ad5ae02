#include "multicap/global_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace multicap {

std::string CostMatrix::format() const {
  std::ostringstream out;
  char buf[64];
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j) out << ' ';
      const double v = at(i, j);
      if (std::isinf(v)) {
        out << "inf";
      } else {
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

const DistanceField& DistanceCache::field(const SymbolicMap& map, CellIndex source) {
  auto& entry = fields_[source];
  if (entry.field.dist.empty() || entry.version != map.obstacle_version()) {
    entry.field = distance_field(map, source);
    entry.version = map.obstacle_version();
    ++misses_;
  } else {
    ++hits_;
  }
  return entry.field;
}

std::pair<AugmentedNodeSet, CostMatrix> build_cost_matrix(
    const AdjacencyGraph& graph, const SymbolicMap& map, std::span<const RobotEntry> robots,
    const CostOptions& options) {
  if (robots.empty()) throw std::invalid_argument("cost matrix needs at least one robot");
  AugmentedNodeSet aug;
  aug.robots.assign(robots.begin(), robots.end());
  for (const auto& [id, node] : graph.nodes()) {
    if (node.state == NodeState::Covered) continue;
    if (std::find(options.excluded.begin(), options.excluded.end(), id) !=
        options.excluded.end()) {
      continue;
    }
    aug.candidates.push_back(id);
  }

  std::vector<CellIndex> positions;
  positions.reserve(aug.size());
  for (const auto& r : aug.robots) positions.push_back(r.cell);
  for (auto id : aug.candidates) positions.push_back(graph.node(id).center);

  const auto n = aug.size();
  const auto& tiling = map.tiling();
  CostMatrix w(n + 1);
  if (options.metric == CostMetric::CenterDistance) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto [xi, yi] = tiling.center_m(positions[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto [xj, yj] = tiling.center_m(positions[j]);
        w.set_symmetric(i, j, std::hypot(xi - xj, yi - yj));
      }
    }
  } else {
    DistanceCache local;
    DistanceCache& cache = options.cache != nullptr ? *options.cache : local;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& field = cache.field(map, positions[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = field.dist[static_cast<std::size_t>(positions[j])];
        w.set_symmetric(i, j, d < kInf ? d * tiling.cell_size() : kInf);
      }
    }
  }
  const auto depot = aug.depot_index();
  for (std::size_t i = 0; i < n; ++i) {
    w.set_symmetric(depot, i, i < aug.robots.size() ? 0.0 : kInf);
  }
  return {std::move(aug), std::move(w)};
}

namespace vrp {

double route_cost(const CostMatrix& w, std::span<const std::size_t> route) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < route.size(); ++k) total += w.at(route[k], route[k + 1]);
  return total;
}

std::vector<std::vector<std::size_t>> greedy_routes(const CostMatrix& w, std::size_t robots,
                                                    std::size_t candidates,
                                                    std::vector<std::size_t>* unassigned) {
  std::vector<std::vector<std::size_t>> routes(robots);
  for (std::size_t m = 0; m < robots; ++m) routes[m].push_back(m);
  std::vector<char> taken(candidates, 0);
  std::size_t remaining = candidates;
  while (remaining > 0) {
    double best = kInf;
    std::size_t best_c = 0;
    std::size_t best_m = 0;
    // Candidate-major scan, so the strict comparison keeps the lowest
    // candidate index and then the lowest robot index among equal costs.
    for (std::size_t c = 0; c < candidates; ++c) {
      if (taken[c]) continue;
      const auto ci = robots + c;
      for (std::size_t m = 0; m < robots; ++m) {
        const double d = w.at(routes[m].back(), ci);
        if (d < best) {
          best = d;
          best_c = c;
          best_m = m;
        }
      }
    }
    if (!(best < kInf)) break;
    taken[best_c] = 1;
    --remaining;
    routes[best_m].push_back(robots + best_c);
  }
  if (unassigned != nullptr) {
    unassigned->clear();
    for (std::size_t c = 0; c < candidates; ++c) {
      if (!taken[c]) unassigned->push_back(robots + c);
    }
  }
  return routes;
}

double two_opt(std::vector<std::size_t>& route, const CostMatrix& w, std::size_t first_movable,
               bool closed, const SolverOptions& options, TwoOptStats* stats) {
  auto total = [&] {
    double t = route_cost(w, route);
    if (closed && route.size() > 1) t += w.at(route.back(), route.front());
    return t;
  };
  const std::size_t len = route.size();
  if (first_movable == 0) first_movable = 1;
  double cost = total();
  if (len < first_movable + 2) {
    if (stats) stats->pass_costs.push_back(cost);
    return cost;
  }
  const long budget = static_cast<long>(options.swap_budget_factor) *
                      static_cast<long>(len) * static_cast<long>(len);
  for (int pass = 0; pass < options.max_passes; ++pass) {
    bool improved = false;
    long evaluated = 0;
    for (std::size_t i = first_movable; i + 1 < len && evaluated < budget; ++i) {
      for (std::size_t j = i + 1; j < len && evaluated < budget; ++j) {
        ++evaluated;
        const auto before = route[i - 1];
        const bool has_after = j + 1 < len || closed;
        const auto after = j + 1 < len ? route[j + 1] : route[0];
        double old_cost = w.at(before, route[i]);
        double new_cost = w.at(before, route[j]);
        if (has_after) {
          old_cost += w.at(route[j], after);
          new_cost += w.at(route[i], after);
        }
        if (new_cost < old_cost - 1e-9) {
          std::reverse(route.begin() + static_cast<std::ptrdiff_t>(i),
                       route.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
    if (stats) stats->evaluations += evaluated;
    const double next = total();
    if (stats) stats->pass_costs.push_back(next);
    cost = next;
    if (!improved) break;
  }
  return cost;
}

}  // namespace vrp

Solution solve_open_mdvrp(const AugmentedNodeSet& aug, const CostMatrix& w,
                          const SolverOptions& options) {
  if (w.size() != aug.size() + 1) {
    throw std::invalid_argument("cost matrix size does not match the augmented node set");
  }
  const auto robots = aug.robots.size();
  std::vector<std::size_t> unassigned;
  auto routes = vrp::greedy_routes(w, robots, aug.candidates.size(), &unassigned);

  Solution solution;
  for (auto& route : routes) {
    solution.greedy_cost += vrp::route_cost(w, route);
    vrp::two_opt(route, w, 1, false, options);
  }
  for (std::size_t m = 0; m < robots; ++m) {
    Tour tour;
    tour.robot = aug.robots[m].id;
    tour.cost_m = vrp::route_cost(w, routes[m]);
    for (std::size_t k = 1; k < routes[m].size(); ++k) {
      tour.nodes.push_back(aug.candidates[routes[m][k] - robots]);
    }
    solution.total_cost += tour.cost_m;
    solution.tours.push_back(std::move(tour));
  }
  for (auto idx : unassigned) solution.unassigned.push_back(aug.candidates[idx - robots]);
  return solution;
}

std::optional<NodeId> next_target(const Solution& solution, RobotId robot) {
  for (const auto& tour : solution.tours) {
    if (tour.robot != robot) continue;
    if (tour.nodes.empty()) return std::nullopt;
    return tour.nodes.front();
  }
  throw std::out_of_range("robot " + std::to_string(robot) + " has no tour");
}

}  // namespace multicap
