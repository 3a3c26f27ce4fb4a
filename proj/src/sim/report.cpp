#include "tsr/sim/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsr {

namespace {

double ms(Time t) { return to_millis(t); }

}  // namespace

Time nearest_rank(const std::vector<Time>& sorted, double q) {
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

LatencySummary summarize(std::vector<Time> samples) {
  LatencySummary s;
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  s.count = samples.size();
  const long double sum = std::accumulate(samples.begin(), samples.end(), static_cast<long double>(0));
  s.mean = static_cast<double>(sum / samples.size()) / kMicrosPerMilli;
  s.p50 = ms(nearest_rank(samples, 50));
  s.p95 = ms(nearest_rank(samples, 95));
  s.p99 = ms(nearest_rank(samples, 99));
  s.p99_9 = ms(nearest_rank(samples, 99.9));
  s.max = ms(samples.back());
  return s;
}

nlohmann::ordered_json to_json(const LatencySummary& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  if (s.count == 0) {
    for (const char* k : {"mean", "p50", "p95", "p99", "p99_9", "max"}) j[k] = nullptr;
    return j;
  }
  j["mean"] = s.mean;
  j["p50"] = s.p50;
  j["p95"] = s.p95;
  j["p99"] = s.p99;
  j["p99_9"] = s.p99_9;
  j["max"] = s.max;
  return j;
}

nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["status"] = to_string(c.status);
  if (!c.note.empty()) j["note"] = c.note;
  if (!c.violations.empty()) {
    auto& vs = j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : c.violations) {
      vs.push_back({{"message", v.message}, {"events", v.events}});
    }
  }
  return j;
}

std::vector<std::vector<Time>> end_to_end_by_site(const RunResult& result, std::size_t sites) {
  std::vector<std::vector<Time>> out(sites);
  for (const auto& c : result.commands) {
    if (c.returned >= 0 && c.site < sites) out[c.site].push_back(c.returned - c.issued);
  }
  return out;
}

nlohmann::ordered_json build_report(const Scenario& sc, const RunResult& result) {
  const std::size_t sites = sc.topology.size();
  std::vector<std::vector<Time>> e2e(sites), commit(sites);
  std::vector<Time> all_e2e, all_commit, commit_to_exec;
  std::uint64_t returned = 0, committed = 0, executed = 0;
  for (const auto& c : result.commands) {
    if (c.committed >= 0) {
      ++committed;
      commit[c.site].push_back(c.committed - c.issued);
      all_commit.push_back(c.committed - c.issued);
    }
    if (c.executed >= 0) {
      ++executed;
      if (c.committed >= 0) commit_to_exec.push_back(c.executed - c.committed);
    }
    if (c.returned >= 0) {
      ++returned;
      e2e[c.site].push_back(c.returned - c.issued);
      all_e2e.push_back(c.returned - c.issued);
    }
  }

  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = sc.name;
  j["seed"] = sc.seed;
  j["r"] = sc.config.r;
  j["f"] = sc.config.f;
  j["partitions"] = sc.config.partitions;
  j["end_ms"] = ms(result.end_time);
  j["horizon_ms"] = ms(result.horizon);
  j["commands"] = {{"submitted", result.commands.size()},
                   {"committed", committed},
                   {"executed", executed},
                   {"returned", returned}};
  j["messages"] = result.messages;
  const auto decided = result.fast + result.slow + result.recovery;
  nlohmann::ordered_json paths;
  paths["fast"] = result.fast;
  paths["slow"] = result.slow;
  paths["recovery"] = result.recovery;
  paths["fast_ratio"] = decided == 0 ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(static_cast<double>(result.fast) / decided);
  j["paths"] = paths;

  auto& site_list = j["sites"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < sites; ++s) {
    nlohmann::ordered_json site;
    site["site"] = s;
    site["name"] = sc.topology.site_name(s);
    site["end_to_end_ms"] = to_json(summarize(e2e[s]));
    site["commit_ms"] = to_json(summarize(commit[s]));
    site_list.push_back(site);
  }
  nlohmann::ordered_json overall;
  overall["end_to_end_ms"] = to_json(summarize(all_e2e));
  overall["commit_ms"] = to_json(summarize(all_commit));
  overall["commit_to_execute_ms"] = to_json(summarize(commit_to_exec));
  j["overall"] = overall;

  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : result.checks) checks.push_back(to_json(c));
  j["passed"] = result.passed();
  j["trace_events"] = result.trace_events;
  j["trace_hash"] = result.trace_hash;
  return j;
}

}  // namespace tsr
