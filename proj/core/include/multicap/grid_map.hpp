#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace multicap {

// Row-major cell index into a Tiling.
using CellIndex = int;

inline constexpr CellIndex kNoCell = -1;

struct GridCoord {
  int row = 0;
  int col = 0;

  auto operator<=>(const GridCoord&) const = default;
};

// Uniform square tiling of a bounded rectangle. Cell centers sit at
// ((col + 0.5) * cell_size, (row + 0.5) * cell_size).
class Tiling {
 public:
  Tiling(int width, int height, double cell_size);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  int cell_count() const { return width_ * height_; }

  bool contains(GridCoord c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  bool contains(CellIndex i) const { return i >= 0 && i < cell_count(); }

  CellIndex index(GridCoord c) const { return c.row * width_ + c.col; }
  GridCoord coord(CellIndex i) const { return {i / width_, i % width_}; }

  // World-frame center of a cell in meters, as (x, y).
  std::pair<double, double> center_m(CellIndex i) const;

  bool operator==(const Tiling&) const = default;

 private:
  int width_;
  int height_;
  double cell_size_;
};

enum class CellLabel : std::uint8_t {
  Unknown,
  Obstacle,
  CoveredFree,
  UncoveredFree,
};

enum class Occupancy : std::uint8_t { Free, Obstacle };

const char* to_string(CellLabel label);

// Cells whose occupancy probability exceeds this are labeled Obstacle.
inline constexpr double kDefaultOccupancyThreshold = 0.2;

struct Observation {
  CellIndex cell = kNoCell;
  double occupancy_probability = 0.0;

  static Observation free(CellIndex c) { return {c, 0.0}; }
  static Observation obstacle(CellIndex c) { return {c, 1.0}; }
};

// The base station's symbolic map together with the hidden ground truth the
// simulator senses from. Planners only read labels.
class SymbolicMap {
 public:
  SymbolicMap(Tiling tiling, std::vector<Occupancy> ground_truth);

  const Tiling& tiling() const { return tiling_; }

  CellLabel label(CellIndex c) const { return labels_[static_cast<std::size_t>(c)]; }
  Occupancy truth(CellIndex c) const { return truth_[static_cast<std::size_t>(c)]; }
  std::span<const CellLabel> labels() const { return labels_; }
  std::span<const Occupancy> ground_truth() const { return truth_; }

  bool is_obstacle(CellIndex c) const { return label(c) == CellLabel::Obstacle; }
  bool is_known_free(CellIndex c) const {
    const auto l = label(c);
    return l == CellLabel::CoveredFree || l == CellLabel::UncoveredFree;
  }

  // Classifies Unknown cells from the evidence; already classified cells are
  // left alone. Returns the cells whose label changed, sorted and unique.
  // Throws std::out_of_range for a cell outside the tiling.
  std::vector<CellIndex> apply_observation(
      std::span<const Observation> observed,
      double occupancy_threshold = kDefaultOccupancyThreshold);

  // UncoveredFree -> CoveredFree. Throws std::logic_error for any other label.
  void mark_covered(CellIndex c);

  std::size_t count(CellLabel label) const {
    return counts_[static_cast<std::size_t>(label)];
  }

  // Number of Obstacle labels; changes exactly when connectivity can change.
  std::size_t obstacle_version() const { return count(CellLabel::Obstacle); }

 private:
  void relabel(CellIndex c, CellLabel to);

  Tiling tiling_;
  std::vector<CellLabel> labels_;
  std::vector<Occupancy> truth_;
  std::size_t counts_[4] = {0, 0, 0, 0};
};

struct ComponentLabeling {
  // Each component is sorted ascending; components are ordered by their
  // smallest cell.
  std::vector<std::vector<CellIndex>> components;

  std::size_t count() const { return components.size(); }
};

// Maximal 4-connected components of `region` minus Obstacle-labeled cells.
// Unknown cells count as non-obstacle.
ComponentLabeling connected_components(const SymbolicMap& map,
                                       std::span<const CellIndex> region);

// In-bounds 4-neighbours of a cell, ordered left, up, down, right.
std::vector<CellIndex> cardinal_neighbors(const Tiling& tiling, CellIndex c);

}  // namespace multicap
