#include "multicap/grid_map.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace multicap {

Tiling::Tiling(int width, int height, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("tiling dimensions must be at least 1x1");
  }
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("cell size must be positive");
  }
}

std::pair<double, double> Tiling::center_m(CellIndex i) const {
  const auto c = coord(i);
  return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
}

const char* to_string(CellLabel label) {
  switch (label) {
    case CellLabel::Unknown: return "U";
    case CellLabel::Obstacle: return "O";
    case CellLabel::CoveredFree: return "F~";
    case CellLabel::UncoveredFree: return "F^";
  }
  return "?";
}

SymbolicMap::SymbolicMap(Tiling tiling, std::vector<Occupancy> ground_truth)
    : tiling_(tiling), truth_(std::move(ground_truth)) {
  if (truth_.size() != static_cast<std::size_t>(tiling_.cell_count())) {
    throw std::invalid_argument("ground truth has " + std::to_string(truth_.size()) +
                                " cells, tiling needs " +
                                std::to_string(tiling_.cell_count()));
  }
  labels_.assign(truth_.size(), CellLabel::Unknown);
  counts_[static_cast<std::size_t>(CellLabel::Unknown)] = labels_.size();
}

void SymbolicMap::relabel(CellIndex c, CellLabel to) {
  auto& slot = labels_[static_cast<std::size_t>(c)];
  --counts_[static_cast<std::size_t>(slot)];
  ++counts_[static_cast<std::size_t>(to)];
  slot = to;
}

std::vector<CellIndex> SymbolicMap::apply_observation(
    std::span<const Observation> observed, double occupancy_threshold) {
  for (const auto& o : observed) {
    if (!tiling_.contains(o.cell)) {
      throw std::out_of_range("observation of cell " + std::to_string(o.cell) +
                              " outside the tiling");
    }
  }
  std::vector<CellIndex> changed;
  for (const auto& o : observed) {
    if (label(o.cell) != CellLabel::Unknown) continue;
    relabel(o.cell, o.occupancy_probability > occupancy_threshold
                        ? CellLabel::Obstacle
                        : CellLabel::UncoveredFree);
    changed.push_back(o.cell);
  }
  std::sort(changed.begin(), changed.end());
  return changed;
}

void SymbolicMap::mark_covered(CellIndex c) {
  if (!tiling_.contains(c)) {
    throw std::out_of_range("cannot cover cell outside the tiling");
  }
  if (label(c) != CellLabel::UncoveredFree) {
    throw std::logic_error("cannot cover cell " + std::to_string(c) + " labeled " +
                           to_string(label(c)));
  }
  relabel(c, CellLabel::CoveredFree);
}

std::vector<CellIndex> cardinal_neighbors(const Tiling& tiling, CellIndex c) {
  const auto p = tiling.coord(c);
  std::vector<CellIndex> out;
  out.reserve(4);
  static constexpr int kDr[4] = {0, -1, 1, 0};
  static constexpr int kDc[4] = {-1, 0, 0, 1};
  for (int k = 0; k < 4; ++k) {
    const GridCoord q{p.row + kDr[k], p.col + kDc[k]};
    if (tiling.contains(q)) out.push_back(tiling.index(q));
  }
  return out;
}

ComponentLabeling connected_components(const SymbolicMap& map,
                                       std::span<const CellIndex> region) {
  const auto& tiling = map.tiling();
  std::vector<CellIndex> cells;
  cells.reserve(region.size());
  for (auto c : region) {
    if (!tiling.contains(c)) throw std::out_of_range("region cell outside the tiling");
    if (!map.is_obstacle(c)) cells.push_back(c);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  // Membership by binary search keeps the cost proportional to the region,
  // not the map.
  auto slot_of = [&](CellIndex c) -> std::ptrdiff_t {
    auto it = std::lower_bound(cells.begin(), cells.end(), c);
    if (it == cells.end() || *it != c) return -1;
    return it - cells.begin();
  };

  ComponentLabeling result;
  std::vector<char> seen(cells.size(), 0);
  std::vector<CellIndex> stack;
  for (std::size_t s = 0; s < cells.size(); ++s) {
    if (seen[s]) continue;
    std::vector<CellIndex> component;
    seen[s] = 1;
    stack.push_back(cells[s]);
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      component.push_back(c);
      for (auto n : cardinal_neighbors(tiling, c)) {
        const auto k = slot_of(n);
        if (k < 0 || seen[static_cast<std::size_t>(k)]) continue;
        seen[static_cast<std::size_t>(k)] = 1;
        stack.push_back(n);
      }
    }
    std::sort(component.begin(), component.end());
    result.components.push_back(std::move(component));
  }
  return result;
}

}  // namespace multicap
