#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tsr/sim/trace.hpp"

namespace tsr {

enum class CheckStatus : std::uint8_t { Pass, Fail, Skipped };
std::string_view to_string(CheckStatus status);

struct Violation {
  std::string message;
  std::vector<std::uint64_t> events;  // indices of the offending trace events
};

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string note;
  std::vector<Violation> violations;
};

/// Names of every check, in report order.
const std::vector<std::string>& check_names();

/// Consumes a trace event by event (live or from a file) and judges the run:
/// validity, replica log equality, execution order, ordering acyclicity,
/// liveness, timestamp agreement, majority-derived commits, fast-path
/// recoverability, stability soundness and the consensus invariants.
class RunChecker {
 public:
  /// Violations kept per check; further ones are only counted.
  static constexpr std::size_t kMaxViolations = 20;

  void consume(const TraceEvent& ev);
  std::vector<CheckResult> finish();

  std::uint64_t events() const { return index_; }

 private:
  struct PidHash {
    std::size_t operator()(const ProcessId& p) const noexcept { return std::hash<ProcessId>{}(p); }
  };
  using Key = std::pair<CommandId, std::uint32_t>;  // (id, partition)

  void fail(const std::string& check, std::string message, std::vector<std::uint64_t> events);
  std::uint32_t node(const CommandId& id);

  void on_send(const TraceEvent& ev);
  void on_proposal(const TraceEvent& ev);
  void on_decide(const TraceEvent& ev);
  void on_commit(const TraceEvent& ev);
  void on_exec(const TraceEvent& ev);

  std::uint64_t index_ = 0;
  std::uint32_t r_ = 0;
  std::uint32_t f_ = 0;
  bool liveness_expected_ = false;
  bool ended_ = false;
  std::map<std::string, CheckResult> results_;
  std::map<std::string, std::uint64_t> dropped_;

  // validity, log equality, execution order
  std::unordered_map<CommandId, std::uint64_t> submitted_;     // id -> submit event
  std::unordered_map<CommandId, std::vector<std::uint32_t>> submit_partitions_;
  std::unordered_map<CommandId, ProcessId> submitter_;
  std::map<ProcessId, std::set<CommandId>> executed_at_;
  std::map<ProcessId, std::pair<Timestamp, CommandId>> last_exec_;
  std::map<ProcessId, std::uint64_t> exec_count_;
  std::map<std::uint32_t, std::vector<std::pair<CommandId, std::uint64_t>>> partition_log_;

  // ordering graph
  std::unordered_map<CommandId, std::uint32_t> nodes_;
  std::uint32_t node_count_ = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::map<ProcessId, std::uint32_t> last_exec_node_;
  std::int64_t last_return_node_ = -1;

  // crashes
  std::set<ProcessId> crashed_;
  std::set<std::uint16_t> crashed_sites_;

  // agreement and consensus monitors
  std::map<Key, std::pair<Timestamp, std::uint64_t>> committed_ts_;   // per-partition committed ts
  std::map<CommandId, std::pair<Timestamp, std::uint64_t>> final_ts_;  // final ts per id
  std::map<Key, std::map<ProcessId, Timestamp>> proposals_;           // fun_ts outputs
  std::map<std::pair<CommandId, ProcessId>, std::map<ProcessId, Timestamp>> propose_acks_;
  std::map<Key, std::map<Ballot, std::pair<Timestamp, std::uint64_t>>> consensus_;
  std::map<Key, std::map<Ballot, std::set<ProcessId>>> consensus_acks_;
  std::map<Key, std::map<Ballot, Timestamp>> chosen_;                   // values acked by f+1
  std::map<Key, std::pair<Timestamp, std::uint64_t>> fast_commits_;     // fast-path commits
  std::map<std::pair<Key, ProcessId>, Ballot> acked_ballot_;            // last MConsensusAck ballot
  std::map<ProcessId, std::pair<Timestamp, std::uint64_t>> stable_;     // last stable value
};

}  // namespace tsr
