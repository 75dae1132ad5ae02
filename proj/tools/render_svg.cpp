#include <cstdio>
#include <stdexcept>
#include <string>

#include "cli.hpp"

namespace multicap::cli {
namespace {

constexpr int kPx = 10;
constexpr const char* kPalette[] = {"#e6194b", "#3cb44b", "#4363d8", "#f58231",
                                    "#911eb4", "#42d4f4", "#f032e6", "#9a6324"};

}  // namespace

std::string render_svg(const Scenario& scenario, const std::vector<TickRecord>& trace) {
  const auto& t = scenario.tiling;
  const auto robots = trace.empty() ? std::size_t{0} : trace.front().robot_cells.size();
  for (const auto& rec : trace) {
    if (rec.robot_cells.size() != robots) {
      throw std::invalid_argument("trace robot count changes at tick " + std::to_string(rec.tick));
    }
    for (auto c : rec.robot_cells) {
      if (!t.contains(c) || scenario.truth[static_cast<std::size_t>(c)] != Occupancy::Free) {
        throw std::invalid_argument("trace places a robot off the free space at tick " +
                                    std::to_string(rec.tick));
      }
    }
  }

  const int w = t.width() * kPx;
  const int h = t.height() * kPx;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
         std::to_string(h) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" fill=\"#ffffff\"/>\n";
  out += "<g fill=\"#333333\">\n";
  for (CellIndex c = 0; c < t.cell_count(); ++c) {
    if (scenario.truth[static_cast<std::size_t>(c)] == Occupancy::Free) continue;
    const auto p = t.coord(c);
    out += "<rect x=\"" + std::to_string(p.col * kPx) + "\" y=\"" + std::to_string(p.row * kPx) +
           "\" width=\"" + std::to_string(kPx) + "\" height=\"" + std::to_string(kPx) + "\"/>\n";
  }
  out += "</g>\n";

  auto point = [&](CellIndex c) {
    const auto p = t.coord(c);
    return std::to_string(p.col * kPx + kPx / 2) + "," + std::to_string(p.row * kPx + kPx / 2);
  };
  for (std::size_t m = 0; m < robots; ++m) {
    const char* color = kPalette[m % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    CellIndex last = kNoCell;
    for (const auto& rec : trace) {
      const auto c = rec.robot_cells[m];
      if (c == last) continue;
      if (!points.empty()) points += ' ';
      points += point(c);
      last = c;
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
  }
  for (std::size_t m = 0; m < robots; ++m) {
    const auto p = t.coord(trace.front().robot_cells[m]);
    const char* color = kPalette[m % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out += "<circle cx=\"" + std::to_string(p.col * kPx + kPx / 2) + "\" cy=\"" +
           std::to_string(p.row * kPx + kPx / 2) + "\" r=\"4\" fill=\"" + color +
           "\" stroke=\"#000000\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace multicap::cli
