#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsr/commit/fast_path.hpp"
#include "tsr/core/types.hpp"
#include "tsr/sim/scenario.hpp"
#include "tsr/sim/simulator.hpp"

namespace tsr::testing {

/// One row of the r = 5 fast-path table: coordinator A proposes `a`, the
/// other fast-quorum members start from the listed clocks.
struct FastPathRow {
  char label;
  std::uint32_t f;
  Timestamp a;
  std::vector<Timestamp> member_clocks;
};

struct FastPathOutcome {
  std::vector<Timestamp> proposals;  // coordinator first
  ProposalDecision decision;
  bool match = false;  // every proposal equal
};

const std::vector<FastPathRow>& fast_path_rows();
FastPathOutcome evaluate_row(const FastPathRow& row);

/// Stable timestamp for each promise-set combination of the three-process
/// stability example, in the order green, red, blue, g+r, g+b, r+b, all.
std::vector<Timestamp> stability_combinations();

/// Four commands on three processes: w(2) and y(2) and z(3) committed, x
/// uncommitted, all delivered to one replica.
struct ComparisonOutcome {
  CommandId w, x, y, z;
  Timestamp stable = 0;
  std::vector<CommandId> executed;
};
ComparisonOutcome run_comparison_example();

/// Loads a bundled scenario by file stem.
Scenario bundled_scenario(const std::string& stem);

/// Simulates `sc` collecting every trace event.
struct TracedRun {
  RunResult result;
  std::vector<TraceEvent> events;
};
TracedRun run_traced(const Scenario& sc);

/// Two-partition command: earliest time the coordinator-side replica of
/// partition 0 reports stable >= final timestamp; -1 if never.
struct MultiPartitionOutcome {
  Timestamp p0_ts = 0;
  Timestamp p1_ts = 0;
  std::vector<Timestamp> final_ts;  // every Commit event
  Time stable_at = -1;
  bool passed = false;
};
MultiPartitionOutcome run_multi_partition(bool mbump);

}  // namespace tsr::testing
