#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "multicap/grid_map.hpp"

namespace multicap {

enum class PlannerVariant : std::uint8_t {
  Full,
  WithoutCA,  // uniform static subareas, proximity-only adjacency
  WithoutGT,  // nearest uncovered subarea instead of global tours
};

// "full", "no_ca", "no_gt"
const char* to_string(PlannerVariant variant);
PlannerVariant parse_variant(std::string_view text);

struct SimulationConfig {
  int robots = 3;
  std::vector<GridCoord> start_cells;  // empty: corner starts derived from seed
  double sensor_range_m = 12.0;
  double subarea_size_m = 6.0;
  double cell_size_m = 0.0;  // 0: take the map file's cell size
  PlannerVariant variant = PlannerVariant::Full;
  std::uint64_t seed = 0;
  long step_budget = 0;  // 0: 50 ticks per map cell
  double occupancy_threshold = kDefaultOccupancyThreshold;
};

// "r,c;r,c;..."
std::vector<GridCoord> parse_start_cells(std::string_view text);

// Sets one `key = value` entry. Throws std::invalid_argument for unknown keys
// or malformed values.
void apply_config_entry(SimulationConfig& config, std::string_view key, std::string_view value);

// key = value lines; blank lines and lines starting with '#' are ignored.
SimulationConfig parse_config(std::string_view text, SimulationConfig base = {});
SimulationConfig load_config(const std::string& path, SimulationConfig base = {});

// Splits `key = value` text into trimmed pairs, shared with the bench spec.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

}  // namespace multicap
