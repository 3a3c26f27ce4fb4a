#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "tsr/sim/scenario.hpp"
#include "tsr/sim/simulator.hpp"

namespace tsr {

constexpr int kReportSchemaVersion = 1;

/// Latency distribution in milliseconds. Percentiles use the nearest-rank
/// method on the sorted sample.
struct LatencySummary {
  std::uint64_t count = 0;
  double mean = 0;
  double p50 = 0;
  double p95 = 0;
  double p99 = 0;
  double p99_9 = 0;
  double max = 0;
};

/// Nearest-rank percentile: the ceil(q/100 * n)-th smallest sample.
/// Requires a non-empty sorted sample and 0 < q <= 100.
Time nearest_rank(const std::vector<Time>& sorted, double q);

LatencySummary summarize(std::vector<Time> samples);

nlohmann::ordered_json to_json(const LatencySummary& s);
nlohmann::ordered_json to_json(const CheckResult& c);

/// End-to-end latencies (issue to return) of returned commands, per client site.
std::vector<std::vector<Time>> end_to_end_by_site(const RunResult& result, std::size_t sites);

/// Builds report.json for one run.
nlohmann::ordered_json build_report(const Scenario& scenario, const RunResult& result);

}  // namespace tsr
