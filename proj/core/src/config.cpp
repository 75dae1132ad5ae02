#include "multicap/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace multicap {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T to_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

}  // namespace

const char* to_string(PlannerVariant variant) {
  switch (variant) {
    case PlannerVariant::Full: return "full";
    case PlannerVariant::WithoutCA: return "no_ca";
    case PlannerVariant::WithoutGT: return "no_gt";
  }
  return "?";
}

PlannerVariant parse_variant(std::string_view text) {
  text = trim(text);
  if (text == "full") return PlannerVariant::Full;
  if (text == "no_ca") return PlannerVariant::WithoutCA;
  if (text == "no_gt") return PlannerVariant::WithoutGT;
  throw std::invalid_argument("unknown variant '" + std::string(text) +
                              "' (expected full, no_ca or no_gt)");
}

std::vector<GridCoord> parse_start_cells(std::string_view text) {
  std::vector<GridCoord> cells;
  text = trim(text);
  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("start cell '" + std::string(item) + "' is not 'row,col'");
    }
    cells.push_back({to_number<int>("start_cells", trim(item.substr(0, comma))),
                     to_number<int>("start_cells", trim(item.substr(comma + 1)))});
  }
  return cells;
}

void apply_config_entry(SimulationConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "robots") {
    config.robots = to_number<int>(key, value);
    if (config.robots < 1) throw std::invalid_argument("robots must be >= 1");
  } else if (key == "start_cells") {
    config.start_cells = parse_start_cells(value);
  } else if (key == "sensor_range_m") {
    config.sensor_range_m = to_number<double>(key, value);
  } else if (key == "subarea_size_m") {
    config.subarea_size_m = to_number<double>(key, value);
  } else if (key == "cell_size_m") {
    config.cell_size_m = to_number<double>(key, value);
  } else if (key == "variant") {
    config.variant = parse_variant(value);
  } else if (key == "seed") {
    config.seed = to_number<std::uint64_t>(key, value);
  } else if (key == "step_budget") {
    config.step_budget = to_number<long>(key, value);
  } else if (key == "occupancy_threshold") {
    config.occupancy_threshold = to_number<double>(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    out.emplace_back(std::string(trim(line.substr(0, eq))),
                     std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

SimulationConfig parse_config(std::string_view text, SimulationConfig base) {
  for (const auto& [k, v] : parse_key_values(text)) apply_config_entry(base, k, v);
  return base;
}

SimulationConfig load_config(const std::string& path, SimulationConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

}  // namespace multicap
