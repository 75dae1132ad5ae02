#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "multicap/grid_map.hpp"

namespace multicap {

// A ground-truth environment. Text format:
//
//   W H CELL_SIZE_M
//   <H rows of exactly W characters, '#' obstacle, '.' free>
//
// Lines are separated by '\n'; a trailing newline is optional and no other
// whitespace is accepted.
struct Scenario {
  std::string name;
  Tiling tiling;
  std::vector<Occupancy> truth;

  SymbolicMap make_map() const { return SymbolicMap(tiling, truth); }
  int free_cell_count() const;
};

// Throws std::invalid_argument with a line-numbered message on malformed text.
Scenario parse_scenario(std::string_view text, std::string name = {});
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& scenario);

}  // namespace multicap
