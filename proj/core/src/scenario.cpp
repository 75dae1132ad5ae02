#include "multicap/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace multicap {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::invalid_argument("scenario line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* field) {
  T value{};
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) {
    fail(line, std::string("bad ") + field + " '" + std::string(token) + "'");
  }
  return value;
}

// Splits on '\n' only; a single trailing newline does not produce a row.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

int Scenario::free_cell_count() const {
  return static_cast<int>(std::count(truth.begin(), truth.end(), Occupancy::Free));
}

Scenario parse_scenario(std::string_view text, std::string name) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(1, "missing header");

  const auto header = lines[0];
  const auto s1 = header.find(' ');
  const auto s2 = s1 == std::string_view::npos ? s1 : header.find(' ', s1 + 1);
  if (s1 == std::string_view::npos || s2 == std::string_view::npos ||
      header.find(' ', s2 + 1) != std::string_view::npos) {
    fail(1, "header must be 'W H CELL_SIZE_M'");
  }
  const int width = parse_number<int>(header.substr(0, s1), 1, "width");
  const int height = parse_number<int>(header.substr(s1 + 1, s2 - s1 - 1), 1, "height");
  const double cell = parse_number<double>(header.substr(s2 + 1), 1, "cell size");
  if (width < 1 || height < 1) fail(1, "dimensions must be positive");
  if (!(cell > 0.0)) fail(1, "cell size must be positive");

  if (lines.size() != static_cast<std::size_t>(height) + 1) {
    fail(lines.size(), "expected " + std::to_string(height) + " rows, found " +
                           std::to_string(lines.size() - 1));
  }
  std::vector<Occupancy> truth;
  truth.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    const auto row = lines[static_cast<std::size_t>(r) + 1];
    const auto line_no = static_cast<std::size_t>(r) + 2;
    if (row.size() != static_cast<std::size_t>(width)) {
      fail(line_no, "expected " + std::to_string(width) + " columns, found " +
                        std::to_string(row.size()));
    }
    for (char ch : row) {
      if (ch == '#') {
        truth.push_back(Occupancy::Obstacle);
      } else if (ch == '.') {
        truth.push_back(Occupancy::Free);
      } else {
        fail(line_no, std::string("unexpected character '") + ch + "'");
      }
    }
  }
  return Scenario{std::move(name), Tiling(width, height, cell), std::move(truth)};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), std::filesystem::path(path).stem().string());
}

std::string format_scenario(const Scenario& scenario) {
  const auto& t = scenario.tiling;
  std::ostringstream out;
  char cell[64];
  auto [ptr, ec] = std::to_chars(cell, cell + sizeof(cell), t.cell_size());
  (void)ec;
  out << t.width() << ' ' << t.height() << ' ' << std::string_view(cell, ptr - cell) << '\n';
  for (int r = 0; r < t.height(); ++r) {
    for (int c = 0; c < t.width(); ++c) {
      out << (scenario.truth[static_cast<std::size_t>(t.index({r, c}))] == Occupancy::Obstacle
                  ? '#'
                  : '.');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace multicap
