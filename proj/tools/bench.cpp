#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "cli.hpp"

namespace multicap::cli {
namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument("bad integer '" + text + "' for " + key);
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

auto row_key(const BenchRow& r) {
  return std::make_tuple(r.scenario, std::string(to_string(r.variant)), r.robots, r.seed);
}

}  // namespace

BenchmarkSpec parse_bench_spec(std::string_view text, const std::string& base_dir) {
  BenchmarkSpec spec;
  bool have_scenarios = false, have_robots = false, have_variants = false;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "scenarios") {
      have_scenarios = true;
      for (auto& s : split_list(value)) {
        std::filesystem::path p(s);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        spec.scenarios.push_back(p.lexically_normal().string());
      }
    } else if (key == "robot_counts") {
      have_robots = true;
      for (auto& s : split_list(value)) {
        const int n = parse_int(key, s);
        if (n < 1) throw std::invalid_argument("robot counts must be >= 1");
        spec.robot_counts.push_back(n);
      }
    } else if (key == "variants") {
      have_variants = true;
      for (auto& s : split_list(value)) spec.variants.push_back(parse_variant(s));
    } else if (key == "repetitions") {
      spec.repetitions = parse_int(key, value);
    } else if (key == "seed_base") {
      spec.seed_base = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "robots" || key == "variant" || key == "seed" || key == "start_cells") {
      throw std::invalid_argument("'" + key + "' is set per run by the sweep");
    } else {
      apply_config_entry(spec.base, key, value);
    }
  }
  if (!have_variants) spec.variants = {PlannerVariant::Full};
  if (!have_scenarios || spec.scenarios.empty()) {
    throw std::invalid_argument("bench spec needs a non-empty 'scenarios' list");
  }
  if (!have_robots || spec.robot_counts.empty()) {
    throw std::invalid_argument("bench spec needs a non-empty 'robot_counts' list");
  }
  if (spec.variants.empty()) throw std::invalid_argument("bench spec has no variants");
  if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  return spec;
}

BenchmarkSpec load_bench_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bench spec '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_bench_spec(buffer.str(), std::filesystem::path(path).parent_path().string());
}

int default_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("MULTICAP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return hw;
}

std::vector<BenchRow> run_bench(const BenchmarkSpec& spec, const BenchOptions& options) {
  struct Job {
    std::size_t scenario;
    PlannerVariant variant;
    int robots;
    std::uint64_t seed;
  };
  std::vector<std::optional<Scenario>> scenarios;
  std::vector<std::string> names, load_errors;
  for (const auto& path : spec.scenarios) {
    try {
      scenarios.push_back(load_scenario(path));
      names.push_back(scenarios.back()->name);
      load_errors.emplace_back();
    } catch (const std::exception& e) {
      scenarios.emplace_back();
      names.push_back(std::filesystem::path(path).stem().string());
      load_errors.emplace_back(e.what());
    }
  }
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < spec.scenarios.size(); ++s) {
    for (auto v : spec.variants) {
      for (int n : spec.robot_counts) {
        for (int rep = 0; rep < spec.repetitions; ++rep) {
          jobs.push_back({s, v, n, spec.seed_base + static_cast<std::uint64_t>(rep)});
        }
      }
    }
  }

  std::vector<BenchRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto k = next++; k < jobs.size(); k = next++) {
      const auto& job = jobs[k];
      auto& row = rows[k];
      row.scenario = names[job.scenario];
      row.variant = job.variant;
      row.robots = job.robots;
      row.seed = job.seed;
      if (!scenarios[job.scenario]) {
        row.error = load_errors[job.scenario];
        continue;
      }
      auto config = spec.base;
      config.robots = job.robots;
      config.variant = job.variant;
      config.seed = job.seed;
      config.start_cells.clear();
      const auto t0 = std::chrono::steady_clock::now();
      try {
        Simulator sim(*scenarios[job.scenario], config);
        auto result = sim.run();
        row.metrics = std::move(result.metrics);
        row.safety = result.safety;
        if (options.keep_plans) row.exit_plans = std::move(result.exit_plans);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      const auto t1 = std::chrono::steady_clock::now();
      if (options.timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      }
    }
  };
  int threads = options.threads > 0 ? options.threads : default_threads();
  threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const BenchRow& a, const BenchRow& b) { return row_key(a) < row_key(b); });
  return rows;
}

std::string format_csv(const std::vector<BenchRow>& rows) {
  std::string out =
      "scenario,variant,robots,seed,path_length_m,overlap_ratio,coverage_time_ticks,"
      "covered_fraction,wall_ms,error\n";
  for (const auto& r : rows) {
    out += csv_field(r.scenario) + ',' + to_string(r.variant) + ',' + std::to_string(r.robots) +
           ',' + std::to_string(r.seed) + ',';
    if (r.error.empty()) {
      out += fmt("%.3f", r.metrics.total_path_length_m) + ',' +
             fmt("%.6f", r.metrics.overlap_ratio) + ',' +
             std::to_string(r.metrics.coverage_time) + ',' +
             fmt("%.6f", r.metrics.covered_fraction) + ',';
    } else {
      out += ",,,,";
    }
    out += fmt("%.3f", r.wall_ms) + ',' + csv_field(r.error) + '\n';
  }
  return out;
}

std::string format_summary(const std::vector<BenchRow>& rows) {
  struct Acc {
    int n = 0, failed = 0;
    double sum[4] = {0, 0, 0, 0};
    double lo[4], hi[4];
  };
  std::map<std::tuple<std::string, std::string, int>, Acc> groups;
  for (const auto& r : rows) {
    auto& a = groups[{r.scenario, to_string(r.variant), r.robots}];
    if (!r.error.empty()) {
      ++a.failed;
      continue;
    }
    const double v[4] = {r.metrics.total_path_length_m, r.metrics.overlap_ratio,
                         static_cast<double>(r.metrics.coverage_time),
                         r.metrics.covered_fraction};
    for (int k = 0; k < 4; ++k) {
      a.lo[k] = a.n ? std::min(a.lo[k], v[k]) : v[k];
      a.hi[k] = a.n ? std::max(a.hi[k], v[k]) : v[k];
      a.sum[k] += v[k];
    }
    ++a.n;
  }
  std::string out =
      "scenario    variant robots runs  path_length_m mean [min, max]   overlap_ratio "
      "mean [min, max]   coverage_time mean [min, max]   covered_fraction mean [min]\n";
  char buf[512];
  for (const auto& [key, a] : groups) {
    const auto& [scenario, variant, robots] = key;
    if (a.n == 0) {
      std::snprintf(buf, sizeof(buf), "%-11s %-7s %6d %4d  all runs failed\n", scenario.c_str(),
                    variant.c_str(), robots, a.failed);
      out += buf;
      continue;
    }
    std::snprintf(buf, sizeof(buf),
                  "%-11s %-7s %6d %4d  %9.1f [%.1f, %.1f]   %7.3f [%.3f, %.3f]   %7.1f [%.0f, "
                  "%.0f]   %.4f [%.4f]%s\n",
                  scenario.c_str(), variant.c_str(), robots, a.n, a.sum[0] / a.n, a.lo[0],
                  a.hi[0], a.sum[1] / a.n, a.lo[1], a.hi[1], a.sum[2] / a.n, a.lo[2], a.hi[2],
                  a.sum[3] / a.n, a.lo[3], a.failed ? " (some runs failed)" : "");
    out += buf;
  }
  return out;
}

int cmd_bench(const std::string& spec_path, const std::string& csv_path,
              const BenchOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto spec = load_bench_spec(spec_path);
    const auto rows = run_bench(spec, options);
    const auto csv = format_csv(rows);
    if (csv_path.empty() || csv_path == "-") {
      out << csv;
      err << format_summary(rows);
    } else {
      std::ofstream file(csv_path, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write '" + csv_path + "'");
      file << csv;
      out << format_summary(rows);
    }
    int failed = 0;
    for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
    if (failed) err << failed << " of " << rows.size() << " runs failed\n";
    return kExitComplete;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace multicap::cli
