#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "multicap/adjacency_graph.hpp"
#include "multicap/trace.hpp"

namespace multicap::cli {
namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

std::string metrics_json(const RunMetrics& m, const std::string& scenario,
                         PlannerVariant variant, int robots, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["variant"] = to_string(variant);
  j["robots"] = robots;
  j["seed"] = seed;
  j["complete"] = m.complete;
  j["budget_exhausted"] = m.budget_exhausted;
  j["covered_fraction"] = m.covered_fraction;
  j["path_length_m"] = m.total_path_length_m;
  j["overlap_ratio"] = m.overlap_ratio;
  j["coverage_time_ticks"] = m.coverage_time;
  j["free_cells"] = m.free_cells;
  j["reachable_free_cells"] = m.reachable_free_cells;
  j["unreachable_free_cells"] = m.unreachable_free_cells;
  j["replans"] = m.replans;
  auto& per = j["per_robot"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.robots.size(); ++i) {
    const auto& r = m.robots[i];
    nlohmann::ordered_json e;
    e["id"] = i;
    e["path_length_m"] = r.path_length_m;
    e["moves"] = r.moves;
    e["waits"] = r.waits;
    e["covered_cells"] = r.covered_cells;
    e["finish_tick"] = r.finish_tick;
    per.push_back(std::move(e));
  }
  return j.dump();
}

int cmd_run(const RunRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const auto scenario = load_scenario(request.map_path);
    Simulator sim(scenario, request.config);
    const auto result = sim.run();
    out << metrics_json(result.metrics, scenario.name, request.config.variant,
                        request.config.robots, request.config.seed)
        << '\n';
    if (!request.trace_path.empty()) {
      write_file(request.trace_path, format_trace(result.trace, sim.map().tiling()));
    }
    if (!request.svg_path.empty()) write_file(request.svg_path, render_svg(scenario, result.trace));
    return result.metrics.complete && result.metrics.covered_fraction >= 1.0 ? kExitComplete
                                                                             : kExitIncomplete;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

std::string graph_dump(const Scenario& scenario, double subarea_size_m) {
  auto map = scenario.make_map();
  std::vector<Observation> all;
  for (CellIndex c = 0; c < scenario.tiling.cell_count(); ++c) {
    all.push_back(map.truth(c) == Occupancy::Free ? Observation::free(c)
                                                  : Observation::obstacle(c));
  }
  map.apply_observation(all);
  const int cells =
      std::max(1, static_cast<int>(std::lround(subarea_size_m / scenario.tiling.cell_size())));
  return AdjacencyGraph::initialize(map, cells).dump();
}

}  // namespace multicap::cli
