#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "multicap/adjacency_graph.hpp"
#include "multicap/config.hpp"
#include "multicap/conflicts.hpp"
#include "multicap/global_planner.hpp"
#include "multicap/grid_map.hpp"
#include "multicap/scenario.hpp"
#include "multicap/sensor.hpp"

namespace multicap {

// How a robot chose its move on the last tick.
enum class DispatchMode : std::uint8_t { Idle, Sweep, Tsp, Yield };

const char* to_string(DispatchMode mode);

struct RobotState {
  RobotId id = -1;
  CellIndex cell = kNoCell;
  std::optional<NodeId> target;
  std::vector<NodeId> tour;            // planned nodes after the target
  std::vector<CellIndex> local_plan;   // remaining Case-2 path, next cell first
  NodeId plan_node = kNoNode;
  CellIndex plan_exit = kNoCell;
  // Index into the exit-plan log, set once the robot is inside the subarea.
  std::optional<std::size_t> plan_record;
  double odometer_m = 0.0;
  bool done = false;
  int wait_ticks = 0;
  bool wants_move = false;
  DispatchMode mode = DispatchMode::Idle;
};

// Events of one tick that can trigger a global replan.
struct TickEvents {
  bool initial = false;
  bool target_completed = false;
  bool target_lost = false;
  bool split_in_tour = false;
  bool candidate_reachable = false;
  bool idle_with_new_candidates = false;
};

bool replan_policy(const TickEvents& events);

struct RobotMetrics {
  double path_length_m = 0.0;
  long moves = 0;
  long waits = 0;
  long covered_cells = 0;
  long finish_tick = 0;
};

struct RunMetrics {
  double total_path_length_m = 0.0;
  double overlap_ratio = 0.0;
  long coverage_time = 0;  // ticks until the last robot finished
  double covered_fraction = 0.0;
  bool complete = false;
  bool budget_exhausted = false;
  int free_cells = 0;
  int reachable_free_cells = 0;
  int unreachable_free_cells = 0;
  long replans = 0;
  std::vector<RobotMetrics> robots;
};

struct TickRecord {
  long tick = 0;
  std::vector<CellIndex> robot_cells;
  int covered = 0;
  std::vector<std::string> events;
};

// How a Case-2 plan ended.
enum class PlanEnd : std::uint8_t {
  Open,         // still being followed when the run stopped
  Completed,    // followed to its final cell
  Replanned,    // no route back onto the plan
  Interrupted,  // subarea split or removed, or the robot moved off the plan
};

const char* to_string(PlanEnd end);

// One Case-2 plan with a specified exit cell, logged from the moment the
// robot enters the subarea; the approach before that is plain travel.
struct ExitPlanRecord {
  RobotId robot = -1;
  NodeId node = kNoNode;
  CellIndex exit = kNoCell;
  PlanEnd end = PlanEnd::Open;
  std::vector<CellIndex> subarea;        // sorted, as planned
  std::vector<CellIndex> executed;       // cells occupied while following the plan

  // kNoCell if the plan never touched the subarea.
  CellIndex last_in_subarea() const;
};

struct SafetyCounters {
  long same_cell_events = 0;
  long obstacle_entries = 0;
};

struct RunResult {
  RunMetrics metrics;
  std::vector<CellIndex> start_cells;
  std::vector<TickRecord> trace;  // entry 0 is the initial state
  std::vector<ExitPlanRecord> exit_plans;
  std::vector<int> visits;  // per cell
  SafetyCounters safety;
};

// Deterministic closed loop: sense, update the map, refine the graph, replan
// when needed, step every robot, resolve conflicts, record.
class Simulator {
 public:
  // Throws std::invalid_argument for invalid start cells or parameters.
  Simulator(const Scenario& scenario, const SimulationConfig& config);

  // Advances one tick; returns false once the run is over.
  bool step();
  RunResult run();

  bool finished() const { return finished_; }
  long tick() const { return tick_; }
  const SymbolicMap& map() const { return map_; }
  const AdjacencyGraph& graph() const { return *graph_; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const SimulationConfig& config() const { return config_; }
  int subarea_size_cells() const { return subarea_cells_; }

  // Snapshot of metrics and logs so far.
  RunResult result() const;

  // Runs one sense/refine/replan cycle without moving robots; used to time
  // the planning pipeline in isolation.
  void plan_only();

 private:
  std::vector<CellIndex> choose_starts(const Scenario& scenario) const;
  std::vector<CellIndex> reachable_from_starts() const;

  std::vector<CellIndex> sense_all();
  void absorb_refinement(const RefinementReport& report, TickEvents& events,
                         std::vector<std::string>& log);
  void replan(std::vector<std::string>& log);
  void replan_tours(std::vector<std::string>& log);
  void replan_nearest(std::vector<std::string>& log);
  std::vector<NodeId> excluded_nodes() const;
  bool any_unassigned_reachable();

  CellIndex propose(RobotState& robot, std::vector<std::string>& log);
  CellIndex propose_sweep(RobotState& robot, const GraphNode& node,
                          const std::vector<CellIndex>& blocked, std::vector<std::string>& log);
  CellIndex propose_tsp(RobotState& robot, const GraphNode& node,
                        const std::vector<CellIndex>& blocked, std::vector<std::string>& log);
  CellIndex yield_cell(const RobotState& robot, const std::vector<CellIndex>& avoid) const;
  // Cell of a resting idle neighbour robot i can push into, else its own cell.
  CellIndex shove_cell(std::size_t i, const std::vector<MoveProposal>& proposals) const;
  std::vector<CellIndex> other_robot_cells(const RobotState& robot) const;
  bool rejoin_plan(RobotState& robot);
  void open_exit_record(RobotState& robot);
  void drop_plan(RobotState& robot, PlanEnd why = PlanEnd::Interrupted);
  void release_target(RobotState& robot);
  bool move_legal(CellIndex from, CellIndex to) const;

  void check_termination();
  void record(std::vector<std::string> events);

  SimulationConfig config_;
  SymbolicMap map_;
  SensorModel sensor_;
  int subarea_cells_ = 1;
  std::optional<AdjacencyGraph> graph_;  // set once the first observations are in
  std::vector<RobotState> robots_;
  std::vector<RobotMetrics> robot_metrics_;
  std::vector<CellIndex> starts_;
  std::vector<char> reachable_;
  int reachable_count_ = 0;
  int covered_reachable_ = 0;
  std::vector<int> visits_;
  DistanceCache cache_;
  std::size_t cache_version_ = 0;
  std::map<NodeId, std::size_t> exhausted_;  // node -> pending-cell signature
  std::vector<NodeId> unassigned_;
  TickEvents pending_;
  long tick_ = 0;
  long budget_ = 0;
  long replans_ = 0;
  long coverage_time_ = 0;
  bool finished_ = false;
  bool budget_exhausted_ = false;
  std::vector<TickRecord> trace_;
  std::vector<ExitPlanRecord> exit_plans_;
  SafetyCounters safety_;
};

}  // namespace multicap
