#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "multicap/trace.hpp"

using namespace multicap;

TEST_CASE("trace lines have a fixed layout") {
  const Tiling t(4, 3, 2.0);
  TickRecord rec{7, {0, 6}, 5, {"replan", "tsp 0 1 \"x\""}};
  CHECK(format_trace_line(rec, t) ==
        "{\"tick\":7,\"robots\":[[0,0],[1,2]],\"covered\":5,"
        "\"events\":[\"replan\",\"tsp 0 1 \\\"x\\\"\"]}");
}

TEST_CASE("traces round-trip") {
  const Tiling t(4, 3, 2.0);
  std::vector<TickRecord> trace{{0, {0, 11}, 2, {"start"}}, {1, {1, 10}, 4, {}},
                                {2, {5, 10}, 5, {"wait 1"}}};
  const auto text = format_trace(trace, t);
  const auto back = parse_trace(text, t);
  REQUIRE(back.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back[k].tick == trace[k].tick);
    CHECK(back[k].robot_cells == trace[k].robot_cells);
    CHECK(back[k].covered == trace[k].covered);
    CHECK(back[k].events == trace[k].events);
  }
  CHECK(format_trace(back, t) == text);
  // 0 -> 1, 1 -> 5 and 11 -> 10 are cardinal steps of 2 m.
  CHECK(trace_path_length(trace, t) == doctest::Approx(6.0));
  const std::vector<TickRecord> diag{{0, {0}, 1, {}}, {1, {5}, 2, {}}};
  CHECK(trace_path_length(diag, t) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("malformed traces throw") {
  const Tiling t(4, 3, 2.0);
  CHECK_THROWS_AS(parse_trace("{\"tick\":0}\n", t), std::invalid_argument);
  CHECK_THROWS_AS(parse_trace("not json\n", t), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_trace("{\"tick\":0,\"robots\":[[5,0]],\"covered\":1,\"events\":[]}\n", t),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_trace("{\"tick\":0,\"robots\":[[0,0]],\"covered\":1,\"events\":[]}\n"
                              "{\"tick\":1,\"robots\":[[0,0],[1,1]],\"covered\":1,\"events\":[]}\n",
                              t),
                  std::invalid_argument);
  CHECK(parse_trace("", t).empty());
}
