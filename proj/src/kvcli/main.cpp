#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "tsr/kvcli/scenario_io.hpp"
#include "tsr/sim/report.hpp"
#include "tsr/sim/simulator.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitViolation = 3;

namespace fs = std::filesystem;
using tsr::CheckStatus;

void configure_logging() {
  const char* level = std::getenv("TSR_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

void print_checks(const std::vector<tsr::CheckResult>& checks) {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Pass) continue;
    std::cout << "  " << c.name << ": " << tsr::to_string(c.status);
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << '\n';
    for (const auto& v : c.violations) std::cout << "    " << v.message << '\n';
  }
}

void print_summary(const nlohmann::ordered_json& report) {
  std::cout << report["scenario"].get<std::string>() << " seed " << report["seed"] << ": "
            << report["commands"]["returned"] << "/" << report["commands"]["submitted"]
            << " commands returned, fast ratio " << report["paths"]["fast_ratio"].dump() << '\n';
  for (const auto& s : report["sites"]) {
    const auto& e = s["end_to_end_ms"];
    std::cout << "  " << s["name"].get<std::string>() << ": mean " << e["mean"].dump() << " ms, p99 "
              << e["p99"].dump() << " ms over " << e["count"] << '\n';
  }
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto v = std::stoull(text);
    return {v, v};
  }
  const auto a = std::stoull(text.substr(0, dots));
  const auto b = std::stoull(text.substr(dots + 2));
  if (b < a) throw std::invalid_argument("seed range is reversed");
  return {a, b};
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, bool with_trace,
            const std::string& out_dir) {
  tsr::Scenario sc;
  try {
    sc = tsr::load_scenario(path);
  } catch (const tsr::ScenarioError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed) sc.seed = *seed;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "config error: cannot create " << out_dir << ": " << ec.message() << '\n';
    return kExitConfig;
  }
  const fs::path report_path = fs::path(out_dir) / "report.json";
  const fs::path trace_path = fs::path(out_dir) / "trace.jsonl";

  std::ofstream trace_file;
  if (with_trace) trace_file.open(trace_path);
  const auto result = tsr::simulate(sc, with_trace ? &trace_file : nullptr);
  const auto report = tsr::build_report(sc, result);
  std::ofstream(report_path) << report.dump(2) << '\n';

  print_summary(report);
  print_checks(result.checks);
  if (!result.passed()) {
    std::cout << "violation; report: " << report_path.string();
    if (with_trace) {
      std::cout << ", trace: " << trace_path.string();
    } else {
      std::cout << " (rerun with --trace to record the events)";
    }
    std::cout << '\n';
    return kExitViolation;
  }
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& seeds, unsigned jobs, const std::string& out_dir) {
  tsr::Scenario base;
  std::pair<std::uint64_t, std::uint64_t> range;
  try {
    base = tsr::load_scenario(path);
    range = parse_seed_range(seeds);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::uint64_t count = range.second - range.first + 1;
  std::vector<nlohmann::ordered_json> reports(count);
  std::atomic<std::uint64_t> next{0};
  std::mutex print;
  auto worker = [&] {
    for (std::uint64_t k = next++; k < count; k = next++) {
      tsr::Scenario sc = base;
      sc.seed = range.first + k;
      const auto result = tsr::simulate(sc);
      reports[k] = tsr::build_report(sc, result);
      if (!result.passed()) {
        std::lock_guard lock(print);
        std::cout << "seed " << sc.seed << ": FAIL\n";
        print_checks(result.checks);
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<std::uint64_t> failing;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (std::uint64_t k = 0; k < count; ++k) {
    if (!reports[k]["passed"].get<bool>()) failing.push_back(range.first + k);
    runs.push_back({{"seed", range.first + k},
                    {"passed", reports[k]["passed"]},
                    {"fast_ratio", reports[k]["paths"]["fast_ratio"]},
                    {"end_to_end_ms", reports[k]["overall"]["end_to_end_ms"]},
                    {"trace_hash", reports[k]["trace_hash"]}});
  }
  std::cout << (count - failing.size()) << "/" << count << " seeds passed\n";
  if (!failing.empty()) {
    std::cout << "failing seeds:";
    for (auto s : failing) std::cout << ' ' << s;
    std::cout << '\n';
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    nlohmann::ordered_json agg;
    agg["schema_version"] = tsr::kReportSchemaVersion;
    agg["scenario"] = base.name;
    agg["seeds"] = count;
    agg["passed"] = count - failing.size();
    agg["failing_seeds"] = failing;
    agg["runs"] = runs;
    std::ofstream(fs::path(out_dir) / "sweep.json") << agg.dump(2) << '\n';
  }
  return failing.empty() ? 0 : kExitViolation;
}

int cmd_check(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "config error: cannot open " << path << '\n';
    return kExitConfig;
  }
  tsr::RunChecker checker;
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      checker.consume(tsr::trace_event_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      std::cerr << "config error: " << path << ":" << n << ": " << e.what() << '\n';
      return kExitConfig;
    }
  }
  const auto checks = checker.finish();
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << c.name << ": " << tsr::to_string(c.status);
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << '\n';
    for (const auto& v : c.violations) {
      std::cout << "  " << v.message;
      if (!v.events.empty()) {
        std::cout << " [events";
        for (auto e : v.events) std::cout << ' ' << e;
        std::cout << ']';
      }
      std::cout << '\n';
    }
    ok = ok && c.status != CheckStatus::Fail;
  }
  return ok ? 0 : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Deterministic simulator for timestamp-stability replication"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", seeds, trace_path, sweep_out;
  std::optional<std::uint64_t> seed;
  bool with_trace = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "Run one scenario and write report.json");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--trace", with_trace, "Also write trace.jsonl");
  run->add_option("--out", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a range of seeds");
  sweep->add_option("scenario", scenario_path, "Scenario file")->required();
  sweep->add_option("--seeds", seeds, "Seed range A..B")->required();
  sweep->add_option("--jobs", jobs, "Parallel simulations");
  sweep->add_option("--out", sweep_out, "Directory for sweep.json");

  auto* check = app.add_subcommand("check", "Check a recorded trace");
  check->add_option("trace", trace_path, "trace.jsonl file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*run) return cmd_run(scenario_path, seed, with_trace, out_dir);
  if (*sweep) return cmd_sweep(scenario_path, seeds, jobs, sweep_out);
  return cmd_check(trace_path);
}
