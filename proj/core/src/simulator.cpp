#include "multicap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

#include "multicap/conflicts.hpp"
#include "multicap/local_planner.hpp"
#include "multicap/path_search.hpp"

namespace multicap {
namespace {

bool contains(const std::vector<CellIndex>& cells, CellIndex c) {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

bool contains_node(const std::vector<NodeId>& nodes, NodeId n) {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

std::string rc(const Tiling& t, CellIndex c) {
  const auto p = t.coord(c);
  return std::to_string(p.row) + "," + std::to_string(p.col);
}

Tiling effective_tiling(const Scenario& scenario, const SimulationConfig& config) {
  if (config.cell_size_m > 0.0) {
    return Tiling(scenario.tiling.width(), scenario.tiling.height(), config.cell_size_m);
  }
  return scenario.tiling;
}

// Uncovered plus unknown cells; an exhausted node becomes eligible again
// once this changes.
std::size_t pending_signature(const GraphNode& node, const SymbolicMap& map) {
  std::size_t n = 0;
  for (auto c : node.subarea) {
    const auto l = map.label(c);
    if (l == CellLabel::UncoveredFree || l == CellLabel::Unknown) ++n;
  }
  return n;
}

constexpr int kDetourWaits = 3;
constexpr int kYieldWaits = 6;

}  // namespace

const char* to_string(PlanEnd end) {
  switch (end) {
    case PlanEnd::Open: return "open";
    case PlanEnd::Completed: return "completed";
    case PlanEnd::Replanned: return "replanned";
    case PlanEnd::Interrupted: return "interrupted";
  }
  return "?";
}

const char* to_string(DispatchMode mode) {
  switch (mode) {
    case DispatchMode::Idle: return "idle";
    case DispatchMode::Sweep: return "sweep";
    case DispatchMode::Tsp: return "tsp";
    case DispatchMode::Yield: return "yield";
  }
  return "?";
}

bool replan_policy(const TickEvents& e) {
  return e.initial || e.target_completed || e.target_lost || e.split_in_tour ||
         e.candidate_reachable || e.idle_with_new_candidates;
}

CellIndex ExitPlanRecord::last_in_subarea() const {
  for (auto it = executed.rbegin(); it != executed.rend(); ++it) {
    if (std::binary_search(subarea.begin(), subarea.end(), *it)) return *it;
  }
  return kNoCell;
}

Simulator::Simulator(const Scenario& scenario, const SimulationConfig& config)
    : config_(config),
      map_(effective_tiling(scenario, config), scenario.truth),
      sensor_{config.sensor_range_m} {
  const auto& t = map_.tiling();
  if (config_.robots < 1) throw std::invalid_argument("at least one robot is required");
  if (!(config_.sensor_range_m >= kSqrt2 * t.cell_size())) {
    throw std::invalid_argument("sensor range must cover the 8 neighbouring cells");
  }
  if (!(config_.subarea_size_m > 0.0)) {
    throw std::invalid_argument("subarea size must be positive");
  }
  if (!(config_.occupancy_threshold >= 0.0 && config_.occupancy_threshold < 1.0)) {
    throw std::invalid_argument("occupancy threshold must lie in [0, 1)");
  }
  subarea_cells_ = std::max(1, static_cast<int>(std::lround(config_.subarea_size_m / t.cell_size())));
  subarea_cells_ = std::min(subarea_cells_, std::max(t.width(), t.height()));
  budget_ = config_.step_budget > 0 ? config_.step_budget : 50L * t.cell_count();

  starts_ = choose_starts(scenario);
  reachable_.assign(static_cast<std::size_t>(t.cell_count()), 0);
  for (const auto& c : reachable_from_starts()) {
    reachable_[static_cast<std::size_t>(c)] = 1;
    ++reachable_count_;
  }
  visits_.assign(static_cast<std::size_t>(t.cell_count()), 0);

  for (std::size_t m = 0; m < starts_.size(); ++m) {
    RobotState r;
    r.id = static_cast<RobotId>(m);
    r.cell = starts_[m];
    robots_.push_back(r);
  }
  robot_metrics_.resize(robots_.size());

  sense_all();
  for (auto& r : robots_) {
    map_.mark_covered(r.cell);
    ++covered_reachable_;
    visits_[static_cast<std::size_t>(r.cell)] = 1;
    robot_metrics_[static_cast<std::size_t>(r.id)].covered_cells = 1;
  }
  graph_.emplace(AdjacencyGraph::initialize(map_, subarea_cells_,
                                      config_.variant == PlannerVariant::WithoutCA
                                          ? Decomposition::Uniform
                                          : Decomposition::ConnectivityAware));
  cache_version_ = map_.obstacle_version();
  pending_.initial = true;
  record({"start"});
  check_termination();
}

std::vector<CellIndex> Simulator::choose_starts(const Scenario& scenario) const {
  const auto& t = map_.tiling();
  std::vector<CellIndex> starts;
  if (!config_.start_cells.empty()) {
    if (static_cast<int>(config_.start_cells.size()) != config_.robots) {
      throw std::invalid_argument("got " + std::to_string(config_.start_cells.size()) +
                                  " start cells for " + std::to_string(config_.robots) +
                                  " robots");
    }
    for (const auto& p : config_.start_cells) {
      if (!t.contains(p)) {
        throw std::invalid_argument("start cell " + std::to_string(p.row) + "," +
                                    std::to_string(p.col) + " is outside the map");
      }
      const auto c = t.index(p);
      if (scenario.truth[static_cast<std::size_t>(c)] != Occupancy::Free) {
        throw std::invalid_argument("start cell " + rc(t, c) + " is an obstacle");
      }
      if (contains(starts, c)) {
        throw std::invalid_argument("start cell " + rc(t, c) + " is used twice");
      }
      starts.push_back(c);
    }
    return starts;
  }

  // Corners in the order top-left, bottom-right, top-right, bottom-left,
  // rotated by the seed; seeds above zero also jitter the corner inward.
  const int corners[4][2] = {{0, 0}, {t.height() - 1, t.width() - 1}, {0, t.width() - 1},
                             {t.height() - 1, 0}};
  std::mt19937_64 rng(config_.seed * 0x9E3779B97F4A7C15ULL + 1);
  for (int m = 0; m < config_.robots; ++m) {
    const auto& k = corners[(static_cast<std::uint64_t>(m) + config_.seed) % 4];
    int row = k[0];
    int col = k[1];
    if (config_.seed > 0) {
      const int dr = static_cast<int>(rng() % 3);
      const int dc = static_cast<int>(rng() % 3);
      row += row == 0 ? dr : -dr;
      col += col == 0 ? dc : -dc;
      row = std::clamp(row, 0, t.height() - 1);
      col = std::clamp(col, 0, t.width() - 1);
    }
    CellIndex best = kNoCell;
    long best_d = 0;
    for (CellIndex c = 0; c < t.cell_count(); ++c) {
      if (scenario.truth[static_cast<std::size_t>(c)] != Occupancy::Free || contains(starts, c)) {
        continue;
      }
      const auto p = t.coord(c);
      const long d = static_cast<long>(p.row - row) * (p.row - row) +
                     static_cast<long>(p.col - col) * (p.col - col);
      if (best == kNoCell || d < best_d) {
        best = c;
        best_d = d;
      }
    }
    if (best == kNoCell) throw std::invalid_argument("not enough free cells for the robots");
    starts.push_back(best);
  }
  return starts;
}

std::vector<CellIndex> Simulator::reachable_from_starts() const {
  // Without corner cutting, 8-connected motion reaches exactly the
  // 4-connected component of free cells.
  const auto& t = map_.tiling();
  std::vector<char> seen(static_cast<std::size_t>(t.cell_count()), 0);
  std::deque<CellIndex> queue;
  for (auto s : starts_) {
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = 1;
      queue.push_back(s);
    }
  }
  std::vector<CellIndex> out;
  while (!queue.empty()) {
    const auto c = queue.front();
    queue.pop_front();
    out.push_back(c);
    for (auto n : cardinal_neighbors(t, c)) {
      if (seen[static_cast<std::size_t>(n)] || map_.truth(n) != Occupancy::Free) continue;
      seen[static_cast<std::size_t>(n)] = 1;
      queue.push_back(n);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CellIndex> Simulator::sense_all() {
  std::vector<Observation> all;
  for (const auto& r : robots_) {
    auto obs = sense(map_, r.cell, sensor_);
    all.insert(all.end(), obs.begin(), obs.end());
  }
  return map_.apply_observation(all, config_.occupancy_threshold);
}

std::vector<CellIndex> Simulator::other_robot_cells(const RobotState& robot) const {
  std::vector<CellIndex> cells;
  for (const auto& r : robots_) {
    if (r.id != robot.id) cells.push_back(r.cell);
  }
  return cells;
}

void Simulator::open_exit_record(RobotState& robot) {
  if (robot.plan_record || robot.plan_exit == kNoCell) return;
  const auto& node = graph_->node(robot.plan_node);
  if (!node.contains(robot.cell)) return;
  ExitPlanRecord rec;
  rec.robot = robot.id;
  rec.node = node.id;
  rec.exit = robot.plan_exit;
  rec.subarea = node.subarea;
  rec.executed.push_back(robot.cell);
  robot.plan_record = exit_plans_.size();
  exit_plans_.push_back(std::move(rec));
}

void Simulator::drop_plan(RobotState& robot, PlanEnd why) {
  if (robot.plan_record) exit_plans_[*robot.plan_record].end = why;
  robot.plan_exit = kNoCell;
  robot.local_plan.clear();
  robot.plan_node = kNoNode;
  robot.plan_record.reset();
}

void Simulator::release_target(RobotState& robot) {
  drop_plan(robot);
  robot.target.reset();
  robot.tour.clear();
  robot.wait_ticks = 0;
}

bool Simulator::move_legal(CellIndex from, CellIndex to) const {
  const Traversable truth_free = [&](CellIndex c) { return map_.truth(c) == Occupancy::Free; };
  return step_allowed(map_.tiling(), from, to, truth_free);
}

void Simulator::absorb_refinement(const RefinementReport& report, TickEvents& events,
                                  std::vector<std::string>& log) {
  for (const auto& [old_id, parts] : report.splits) {
    std::string line = "split " + std::to_string(old_id) + " ";
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k) line += ",";
      line += std::to_string(parts[k]);
    }
    log.push_back(line);
  }
  for (auto n : report.removed_nodes) {
    bool split = false;
    for (const auto& s : report.splits) split = split || s.first == n;
    if (!split) log.push_back("remove " + std::to_string(n));
    exhausted_.erase(n);
  }

  for (auto& r : robots_) {
    if (r.target && contains_node(report.removed_nodes, *r.target)) {
      const NodeId old = *r.target;
      NodeId part = graph_->owner(r.cell);
      bool remapped = false;
      for (const auto& [old_id, parts] : report.splits) {
        if (old_id == old && part != kNoNode && contains_node(parts, part)) remapped = true;
      }
      drop_plan(r);
      if (remapped) {
        r.target = part;
        log.push_back("remap " + std::to_string(r.id) + " " + std::to_string(part));
      } else {
        log.push_back("lost " + std::to_string(r.id) + " " + std::to_string(old));
        r.target.reset();
        events.target_lost = true;
      }
      events.split_in_tour = events.split_in_tour || !report.splits.empty();
    }
    const auto before = r.tour.size();
    std::erase_if(r.tour, [&](NodeId n) { return contains_node(report.removed_nodes, n); });
    if (r.tour.size() != before) events.split_in_tour = true;
  }

  const bool idle = std::any_of(robots_.begin(), robots_.end(),
                                [](const RobotState& r) { return !r.target; });
  for (auto it = exhausted_.begin(); it != exhausted_.end();) {
    const auto* node = graph_->find(it->first);
    if (node == nullptr || pending_signature(*node, map_) != it->second) {
      it = exhausted_.erase(it);
      if (idle) events.idle_with_new_candidates = true;
    } else {
      ++it;
    }
  }
  if (idle && !report.created_nodes.empty()) events.idle_with_new_candidates = true;
  if (!unassigned_.empty() && !report.empty() && any_unassigned_reachable()) {
    events.candidate_reachable = true;
  }
}

bool Simulator::any_unassigned_reachable() {
  for (auto n : unassigned_) {
    const auto* node = graph_->find(n);
    if (node == nullptr) return true;  // replaced by new nodes; let the planner decide
    if (node->state == NodeState::Covered) continue;
    for (const auto& r : robots_) {
      if (cache_.field(map_, r.cell).reachable(node->center)) return true;
    }
  }
  return false;
}

std::vector<NodeId> Simulator::excluded_nodes() const {
  std::vector<NodeId> out;
  for (const auto& [n, sig] : exhausted_) out.push_back(n);
  for (const auto& r : robots_) {
    if (r.target) out.push_back(*r.target);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Simulator::replan(std::vector<std::string>& log) {
  ++replans_;
  log.push_back("replan");
  if (config_.variant == PlannerVariant::WithoutGT) {
    replan_nearest(log);
  } else {
    replan_tours(log);
  }
}

void Simulator::replan_tours(std::vector<std::string>& log) {
  // Only robots without a target take part; the others keep their subarea
  // and everything else, including their old tour remainders, is re-pooled.
  std::vector<RobotEntry> entries;
  std::vector<std::size_t> members;
  for (std::size_t m = 0; m < robots_.size(); ++m) {
    if (robots_[m].target) continue;
    entries.push_back({robots_[m].id, robots_[m].cell});
    members.push_back(m);
  }
  if (entries.empty()) return;
  CostOptions options;
  options.metric = config_.variant == PlannerVariant::WithoutCA ? CostMetric::CenterDistance
                                                               : CostMetric::PathLength;
  options.excluded = excluded_nodes();
  options.cache = &cache_;
  const auto [aug, w] = build_cost_matrix(*graph_, map_, entries, options);
  const auto solution = solve_open_mdvrp(aug, w);
  unassigned_ = solution.unassigned;

  for (std::size_t k = 0; k < members.size(); ++k) {
    auto& r = robots_[members[k]];
    const auto& nodes = solution.tours[k].nodes;
    if (nodes.empty()) {
      if (!r.done) log.push_back("done " + std::to_string(r.id));
      r.done = true;
      r.tour.clear();
      continue;
    }
    r.done = false;
    r.target = nodes.front();
    r.tour.assign(nodes.begin() + 1, nodes.end());
    r.wait_ticks = 0;
    log.push_back("target " + std::to_string(r.id) + " " + std::to_string(*r.target));
  }
}

void Simulator::replan_nearest(std::vector<std::string>& log) {
  auto taken = excluded_nodes();
  std::vector<NodeId> reachable_any;
  for (auto& r : robots_) {
    if (r.target) continue;
    r.tour.clear();
    const auto& field = cache_.field(map_, r.cell);
    NodeId best = kNoNode;
    double best_d = kInf;
    for (const auto& [id, node] : graph_->nodes()) {
      if (node.state == NodeState::Covered || contains_node(taken, id)) continue;
      const double d = field.dist[static_cast<std::size_t>(node.center)];
      if (d < best_d) {
        best = id;
        best_d = d;
      }
    }
    if (best == kNoNode) {
      if (!r.done) log.push_back("done " + std::to_string(r.id));
      r.done = true;
      continue;
    }
    r.done = false;
    r.target = best;
    r.wait_ticks = 0;
    taken.push_back(best);
    log.push_back("target " + std::to_string(r.id) + " " + std::to_string(best));
  }

  unassigned_.clear();
  for (const auto& [id, node] : graph_->nodes()) {
    if (node.state == NodeState::Covered || contains_node(taken, id)) continue;
    bool reach = false;
    for (const auto& r : robots_) {
      reach = reach || cache_.field(map_, r.cell).reachable(node.center);
    }
    if (!reach) unassigned_.push_back(id);
  }
}

CellIndex Simulator::yield_cell(const RobotState& robot,
                                const std::vector<CellIndex>& avoid) const {
  const auto& t = map_.tiling();
  const Traversable open = [&](CellIndex c) { return map_.is_known_free(c); };
  const auto p = t.coord(robot.cell);
  for (const auto& d : kSweepOrder) {
    const GridCoord q{p.row + d[0], p.col + d[1]};
    if (!t.contains(q)) continue;
    const auto c = t.index(q);
    if (contains(avoid, c)) continue;
    if (step_allowed(t, robot.cell, c, open)) return c;
  }
  return robot.cell;
}

CellIndex Simulator::shove_cell(std::size_t i, const std::vector<MoveProposal>& proposals) const {
  const auto& t = map_.tiling();
  const auto& robot = robots_[i];
  const Traversable open = [&](CellIndex c) { return map_.is_known_free(c); };
  const auto p = t.coord(robot.cell);
  for (const auto& d : kSweepOrder) {
    const GridCoord q{p.row + d[0], p.col + d[1]};
    if (!t.contains(q)) continue;
    const auto c = t.index(q);
    if (!step_allowed(t, robot.cell, c, open)) continue;
    for (std::size_t k = 0; k < robots_.size(); ++k) {
      const bool resting = k != i && robots_[k].cell == c && proposals[k].to == c &&
                           robots_[k].mode == DispatchMode::Idle;
      // Never shove back toward a robot that is pushing us.
      if (resting && proposals[k].to != proposals[i].from) return c;
    }
  }
  return robot.cell;
}

CellIndex Simulator::propose_sweep(RobotState& robot, const GraphNode& node,
                                   const std::vector<CellIndex>& blocked,
                                   std::vector<std::string>& log) {
  robot.mode = DispatchMode::Sweep;
  auto s = sweep_step(map_, node.subarea, robot.cell, blocked);
  if (s.kind == LocalStep::Kind::Done && s.remainder) {
    // Only robots in the way? Then push toward them and let conflict
    // resolution hold us.
    s = sweep_step(map_, node.subarea, robot.cell);
    if (s.kind == LocalStep::Kind::Done && s.remainder) {
      exhausted_[node.id] = pending_signature(node, map_);
      log.push_back("exhausted " + std::to_string(node.id));
      release_target(robot);
      pending_.target_completed = true;
      robot.mode = DispatchMode::Idle;
      return robot.cell;
    }
  }
  if (s.kind == LocalStep::Kind::Done) return robot.cell;
  robot.wants_move = true;
  return s.cell;
}

bool Simulator::rejoin_plan(RobotState& robot) {
  // Cells that turned out to be obstacles are dropped; the rest of the plan
  // keeps its order and its exit.
  auto& plan = robot.local_plan;
  std::erase_if(plan, [&](CellIndex c) { return map_.is_obstacle(c); });
  while (!plan.empty() && plan.front() == robot.cell) plan.erase(plan.begin());
  if (plan.empty()) {
    if (robot.plan_record && exit_plans_[*robot.plan_record].exit == robot.cell) {
      exit_plans_[*robot.plan_record].end = PlanEnd::Completed;
      robot.plan_record.reset();
    }
    return false;
  }
  const auto path = shortest_cell_path(map_, robot.cell, plan.front(), optimistic_traversable(map_));
  if (!path) return false;
  plan.insert(plan.begin(), path->cells.begin() + 1, path->cells.end() - 1);
  return true;
}

CellIndex Simulator::propose_tsp(RobotState& robot, const GraphNode& node,
                                 const std::vector<CellIndex>& blocked,
                                 std::vector<std::string>& log) {
  const auto& t = map_.tiling();
  const Traversable non_obstacle = optimistic_traversable(map_);
  if (robot.plan_node == node.id && !robot.local_plan.empty() &&
      !step_allowed(t, robot.cell, robot.local_plan.front(), non_obstacle) && rejoin_plan(robot)) {
    log.push_back("rejoin " + std::to_string(robot.id));
  }
  const bool stale = robot.plan_node != node.id || robot.local_plan.empty() ||
                     !step_allowed(t, robot.cell, robot.local_plan.front(), non_obstacle);
  if (stale) {
    drop_plan(robot, PlanEnd::Replanned);
    bool pending = false;
    for (auto c : node.subarea) pending = pending || map_.label(c) == CellLabel::UncoveredFree;
    std::optional<NodeId> next;
    if (!robot.tour.empty()) next = robot.tour.front();
    auto exit = select_exit_cell(*graph_, map_, node.id, next);
    if (exit && *exit == robot.cell) exit.reset();
    if (!pending && !exit) return robot.cell;  // covered; released next tick
    std::vector<CellIndex> path;
    try {
      path = plan_tsp_coverage(map_, node.subarea, robot.cell, exit);
    } catch (const UnreachableCellError&) {
      return propose_sweep(robot, node, blocked, log);
    }
    if (path.size() < 2) return robot.cell;
    robot.local_plan.assign(path.begin() + 1, path.end());
    robot.plan_node = node.id;
    log.push_back("tsp " + std::to_string(robot.id) + " " + std::to_string(node.id) + " " +
                  (exit ? rc(t, *exit) : std::string("-")));
    robot.plan_exit = exit ? *exit : kNoCell;
    open_exit_record(robot);
  }
  robot.mode = DispatchMode::Tsp;
  robot.wants_move = true;

  // Thresholds are staggered by id so that two robots never detour in lockstep.
  if (robot.wait_ticks >= kDetourWaits + robot.id && contains(blocked, robot.local_plan.front())) {
    // Route around the robots in the way to the first free plan cell.
    std::size_t k = 0;
    while (k < robot.local_plan.size() && contains(blocked, robot.local_plan[k])) ++k;
    if (k < robot.local_plan.size()) {
      const Traversable around = [&](CellIndex c) {
        return !map_.is_obstacle(c) && !contains(blocked, c);
      };
      auto detour = shortest_cell_path(map_, robot.cell, robot.local_plan[k], around);
      if (detour && detour->cells.size() >= 2 &&
          detour->cells.size() <= k + 2 + 2 * static_cast<std::size_t>(subarea_cells_)) {
        std::vector<CellIndex> plan(detour->cells.begin() + 1, detour->cells.end());
        plan.insert(plan.end(), robot.local_plan.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                    robot.local_plan.end());
        robot.local_plan = std::move(plan);
        log.push_back("detour " + std::to_string(robot.id));
      }
    }
  }
  return robot.local_plan.front();
}

CellIndex Simulator::propose(RobotState& robot, std::vector<std::string>& log) {
  robot.mode = DispatchMode::Idle;
  robot.wants_move = false;
  if (!robot.target) return robot.cell;
  const auto* node = graph_->find(*robot.target);
  if (node == nullptr) {
    release_target(robot);
    pending_.target_lost = true;
    return robot.cell;
  }
  const auto blocked = other_robot_cells(robot);
  const bool following = robot.plan_node == node->id && !robot.local_plan.empty();
  if (node->state == NodeState::Explored || following) {
    return propose_tsp(robot, *node, blocked, log);
  }
  if (node->state == NodeState::Exploring) return propose_sweep(robot, *node, blocked, log);
  return robot.cell;
}

bool Simulator::step() {
  if (finished_) return false;
  ++tick_;
  std::vector<std::string> log;

  // Sense and fold the observations into the map and the graph.
  const auto changed = sense_all();
  if (!changed.empty()) log.push_back("observe " + std::to_string(changed.size()));
  if (map_.obstacle_version() != cache_version_) {
    cache_.clear();
    cache_version_ = map_.obstacle_version();
  }
  TickEvents events = pending_;
  pending_ = {};
  if (!changed.empty()) {
    const auto report = graph_->refine(map_, changed);
    absorb_refinement(report, events, log);
  }

  for (auto& r : robots_) {
    if (!r.target) continue;
    const auto& node = graph_->node(*r.target);
    // Inside its subarea a robot still walks to the exit; anywhere else a
    // covered target is released.
    if (node.state == NodeState::Covered && !r.plan_record) {
      release_target(r);
      events.target_completed = true;
    }
  }
  if (replan_policy(events)) replan(log);

  // Proposals in id order, then idle robots step aside. An idle robot with
  // nowhere to go shoves an idle neighbour, which steps aside in turn.
  std::vector<MoveProposal> proposals;
  for (auto& r : robots_) proposals.push_back({r.id, r.cell, propose(r, log)});
  std::vector<char> handled(robots_.size(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      auto& r = robots_[i];
      if (handled[i]) continue;
      const bool stuck = r.wants_move && r.wait_ticks >= kYieldWaits + r.id;
      bool pushed = false;
      for (std::size_t j = 0; j < robots_.size(); ++j) {
        pushed = pushed || (j != i && proposals[j].to == r.cell);
      }
      const bool idle = r.mode == DispatchMode::Idle;
      if (!(idle && pushed) && !stuck) continue;
      handled[i] = 1;
      std::vector<CellIndex> avoid;
      for (std::size_t j = 0; j < robots_.size(); ++j) {
        if (j == i) continue;
        avoid.push_back(robots_[j].cell);
        avoid.push_back(proposals[j].to);
      }
      auto c = yield_cell(r, avoid);
      if (c == r.cell && idle) c = shove_cell(i, proposals);
      if (c == r.cell) continue;
      proposals[i].to = c;
      changed = true;
      if (stuck) r.wait_ticks = 0;
      r.mode = DispatchMode::Yield;
      log.push_back("yield " + std::to_string(r.id));
    }
  }

  const auto approved = resolve_conflicts(proposals);
  const auto& t = map_.tiling();
  std::vector<CellIndex> covered_now;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    auto& r = robots_[i];
    auto& metrics = robot_metrics_[i];
    const auto dest = approved[i];
    if (dest == r.cell) {
      if (proposals[i].to != r.cell) {
        ++r.wait_ticks;
        ++metrics.waits;
        log.push_back("wait " + std::to_string(r.id));
      }
      continue;
    }
    if (!move_legal(r.cell, dest)) {
      ++safety_.obstacle_entries;
      continue;
    }
    r.odometer_m += step_cost(t, r.cell, dest) * t.cell_size();
    r.cell = dest;
    r.wait_ticks = 0;
    ++metrics.moves;
    metrics.finish_tick = tick_;
    ++visits_[static_cast<std::size_t>(dest)];
    if (map_.label(dest) == CellLabel::UncoveredFree) {
      map_.mark_covered(dest);
      covered_now.push_back(dest);
      ++metrics.covered_cells;
      if (reachable_[static_cast<std::size_t>(dest)]) ++covered_reachable_;
    }
    if (r.mode == DispatchMode::Tsp && !r.local_plan.empty() && r.local_plan.front() == dest) {
      r.local_plan.erase(r.local_plan.begin());
      if (r.plan_record) {
        exit_plans_[*r.plan_record].executed.push_back(dest);
      } else {
        open_exit_record(r);
      }
      if (r.plan_record && r.local_plan.empty()) {
        exit_plans_[*r.plan_record].end = PlanEnd::Completed;
        r.plan_record.reset();
      }
    } else if (r.mode == DispatchMode::Yield && r.plan_record) {
      exit_plans_[*r.plan_record].executed.push_back(dest);
    } else if (r.mode != DispatchMode::Tsp && r.plan_record) {
      drop_plan(r);
    }
  }
  if (!covered_now.empty()) graph_->refresh_states(map_, covered_now);

  for (std::size_t i = 0; i < robots_.size(); ++i) {
    if (map_.truth(robots_[i].cell) != Occupancy::Free) ++safety_.obstacle_entries;
    for (std::size_t j = i + 1; j < robots_.size(); ++j) {
      if (robots_[i].cell == robots_[j].cell) ++safety_.same_cell_events;
    }
  }
  record(std::move(log));
  check_termination();
  return !finished_;
}

void Simulator::check_termination() {
  if (covered_reachable_ >= reachable_count_) {
    finished_ = true;
    coverage_time_ = tick_;
    return;
  }
  const bool idle = std::all_of(robots_.begin(), robots_.end(),
                                [](const RobotState& r) { return !r.target && r.done; });
  if (idle && !replan_policy(pending_) && tick_ > 0) {
    finished_ = true;
    coverage_time_ = tick_;
    return;
  }
  if (tick_ >= budget_) {
    finished_ = true;
    budget_exhausted_ = true;
    coverage_time_ = tick_;
  }
}

void Simulator::record(std::vector<std::string> events) {
  TickRecord rec;
  rec.tick = tick_;
  for (const auto& r : robots_) rec.robot_cells.push_back(r.cell);
  rec.covered = static_cast<int>(map_.count(CellLabel::CoveredFree));
  rec.events = std::move(events);
  trace_.push_back(std::move(rec));
}

void Simulator::plan_only() {
  std::vector<std::string> log;
  const auto changed = sense_all();
  if (map_.obstacle_version() != cache_version_) {
    cache_.clear();
    cache_version_ = map_.obstacle_version();
  }
  TickEvents events;
  if (!changed.empty()) absorb_refinement(graph_->refine(map_, changed), events, log);
  replan(log);
}

RunResult Simulator::run() {
  while (step()) {
  }
  return result();
}

RunResult Simulator::result() const {
  RunResult out;
  auto& m = out.metrics;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    auto rm = robot_metrics_[i];
    rm.path_length_m = robots_[i].odometer_m;
    m.total_path_length_m += rm.path_length_m;
    m.robots.push_back(rm);
  }
  long repeats = 0;
  for (auto v : visits_) repeats += std::max(v - 1, 0);
  m.free_cells = 0;
  for (auto o : map_.ground_truth()) m.free_cells += o == Occupancy::Free ? 1 : 0;
  m.reachable_free_cells = reachable_count_;
  m.unreachable_free_cells = m.free_cells - reachable_count_;
  m.overlap_ratio = reachable_count_ > 0 ? static_cast<double>(repeats) / reachable_count_ : 0.0;
  m.covered_fraction =
      m.free_cells > 0 ? static_cast<double>(map_.count(CellLabel::CoveredFree)) / m.free_cells
                       : 1.0;
  m.complete = covered_reachable_ >= reachable_count_;
  m.budget_exhausted = budget_exhausted_;
  m.coverage_time = finished_ ? coverage_time_ : tick_;
  m.replans = replans_;

  out.start_cells = starts_;
  out.trace = trace_;
  out.exit_plans = exit_plans_;
  out.visits = visits_;
  out.safety = safety_;
  return out;
}

}  // namespace multicap
