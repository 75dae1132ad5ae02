#include "multicap/trace.hpp"

#include <cctype>
#include <stdexcept>

#include "multicap/path_search.hpp"

namespace multicap {
namespace {

std::string json_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

// Tiny cursor over one trace line; the format is ours, so this accepts
// exactly what format_trace_line produces (plus insignificant spaces).
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool peek(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  void key(std::string_view k) {
    expect('"');
    if (s_.substr(i_, k.size()) != k) fail("expected key " + std::string(k));
    i_ += k.size();
    expect('"');
    expect(':');
  }
  long number() {
    skip();
    const auto start = i_;
    if (i_ < s_.size() && s_[i_] == '-') ++i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected a number");
    return std::stol(std::string(s_.substr(start, i_ - start)));
  }
  std::string string() {
    expect('"');
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    expect('"');
    return out;
  }
  void end() {
    skip();
    if (i_ != s_.size()) fail("trailing characters");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("trace line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::string_view s_;
  std::size_t line_;
  std::size_t i_ = 0;
};

}  // namespace

std::string format_trace_line(const TickRecord& record, const Tiling& tiling) {
  std::string out = "{\"tick\":" + std::to_string(record.tick) + ",\"robots\":[";
  for (std::size_t k = 0; k < record.robot_cells.size(); ++k) {
    const auto p = tiling.coord(record.robot_cells[k]);
    if (k) out += ',';
    out += '[' + std::to_string(p.row) + ',' + std::to_string(p.col) + ']';
  }
  out += "],\"covered\":" + std::to_string(record.covered) + ",\"events\":[";
  for (std::size_t k = 0; k < record.events.size(); ++k) {
    if (k) out += ',';
    out += '"' + json_escape(record.events[k]) + '"';
  }
  out += "]}";
  return out;
}

std::string format_trace(const std::vector<TickRecord>& trace, const Tiling& tiling) {
  std::string out;
  for (const auto& rec : trace) {
    out += format_trace_line(rec, tiling);
    out += '\n';
  }
  return out;
}

std::vector<TickRecord> parse_trace(std::string_view text, const Tiling& tiling) {
  std::vector<TickRecord> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Cursor cur(line, line_no);
    TickRecord rec;
    cur.expect('{');
    cur.key("tick");
    rec.tick = cur.number();
    cur.expect(',');
    cur.key("robots");
    cur.expect('[');
    while (!cur.peek(']')) {
      if (!rec.robot_cells.empty()) cur.expect(',');
      cur.expect('[');
      const auto row = static_cast<int>(cur.number());
      cur.expect(',');
      const auto col = static_cast<int>(cur.number());
      cur.expect(']');
      if (!tiling.contains(GridCoord{row, col})) cur.fail("robot cell outside the map");
      rec.robot_cells.push_back(tiling.index({row, col}));
    }
    cur.expect(']');
    cur.expect(',');
    cur.key("covered");
    rec.covered = static_cast<int>(cur.number());
    cur.expect(',');
    cur.key("events");
    cur.expect('[');
    while (!cur.peek(']')) {
      if (!rec.events.empty()) cur.expect(',');
      rec.events.push_back(cur.string());
    }
    cur.expect(']');
    cur.expect('}');
    cur.end();
    if (!out.empty() && out.front().robot_cells.size() != rec.robot_cells.size()) {
      cur.fail("robot count changes within the trace");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

double trace_path_length(const std::vector<TickRecord>& trace, const Tiling& tiling) {
  double total = 0.0;
  if (trace.empty()) return total;
  const auto robots = trace.front().robot_cells.size();
  for (std::size_t m = 0; m < robots; ++m) {
    double robot = 0.0;
    for (std::size_t k = 1; k < trace.size(); ++k) {
      const auto a = trace[k - 1].robot_cells[m];
      const auto b = trace[k].robot_cells[m];
      if (a != b) robot += step_cost(tiling, a, b) * tiling.cell_size();
    }
    total += robot;
  }
  return total;
}

}  // namespace multicap
