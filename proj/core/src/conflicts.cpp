#include "multicap/conflicts.hpp"

#include <algorithm>
#include <numeric>

namespace multicap {

std::vector<CellIndex> resolve_conflicts(std::span<const MoveProposal> proposals) {
  const auto n = proposals.size();
  std::vector<CellIndex> dest(n);
  for (std::size_t i = 0; i < n; ++i) dest[i] = proposals[i].to;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return proposals[a].robot < proposals[b].robot;
  });
  auto moving = [&](std::size_t i) { return dest[i] != proposals[i].from; };
  auto hold = [&](std::size_t i) { dest[i] = proposals[i].from; };

  // Every pass only turns movers into stayers, so this terminates.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      const auto i = order[a];
      for (std::size_t b = a + 1; b < n; ++b) {
        const auto j = order[b];
        if (dest[i] == dest[j] && (moving(i) || moving(j))) {
          // A stayer keeps its cell; between two movers the lower id wins.
          if (moving(j)) {
            hold(j);
          } else {
            hold(i);
          }
          changed = true;
        } else if (moving(i) && moving(j) && dest[i] == proposals[j].from &&
                   dest[j] == proposals[i].from) {
          hold(j);
          changed = true;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!moving(i)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && !moving(j) && proposals[j].from == dest[i]) {
          hold(i);
          changed = true;
          break;
        }
      }
    }
  }
  return dest;
}

}  // namespace multicap
