#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "multicap/grid_map.hpp"
#include "multicap/simulator.hpp"

namespace multicap {

// {"tick":N,"robots":[[r,c],...],"covered":K,"events":["...",...]}
// Field order is fixed so traces can be compared byte for byte.
std::string format_trace_line(const TickRecord& record, const Tiling& tiling);

// All records, one line each, newline terminated.
std::string format_trace(const std::vector<TickRecord>& trace, const Tiling& tiling);

// Inverse of format_trace. Throws std::invalid_argument on malformed lines or
// cells outside the tiling.
std::vector<TickRecord> parse_trace(std::string_view text, const Tiling& tiling);

// Length of the robot paths implied by consecutive trace positions, meters.
double trace_path_length(const std::vector<TickRecord>& trace, const Tiling& tiling);

}  // namespace multicap
