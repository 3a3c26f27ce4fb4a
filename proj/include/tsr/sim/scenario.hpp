#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsr/commit/messages.hpp"
#include "tsr/core/config.hpp"
#include "tsr/core/topology.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

/// Crash of one process, or of every process at a site when `partition` is
/// absent.
struct CrashSpec {
  Time at = 0;
  std::uint16_t site = 0;
  std::optional<PartitionId> partition;
};

/// Crashes `per_partition` distinct processes of each listed partition at
/// uniformly random times in [from, to].
struct RandomCrashSpec {
  std::uint32_t per_partition = 0;
  Time from = 0;
  Time to = 0;
  std::vector<PartitionId> partitions;  // empty = every configured partition
};

/// Messages matching every present field and sent in [from, to) are lost.
struct DropRule {
  std::optional<ProcessId> src;
  std::optional<ProcessId> dst;
  std::optional<MsgType> msg;
  Time from = 0;
  Time to = std::numeric_limits<Time>::max();
};

struct NetworkSpec {
  Time jitter = 0;               // uniform extra delay in [0, jitter]
  Time reorder_extra = 0;        // before gst: uniform extra delay in [0, reorder_extra]
  Time gst = 0;
  std::vector<DropRule> drops;
};

struct ScriptedCommand {
  Time at = 0;
  std::uint16_t site = 0;
  std::map<PartitionId, std::vector<Key>> accesses;
  OpKind op = OpKind::Put;
};

enum class WorkloadKind : std::uint8_t { Conflict, Zipf, Script, RoundRobin };
enum class PartitionMap : std::uint8_t { Range, Modulo, Identity };

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Conflict;
  std::uint32_t clients_per_site = 0;
  double conflict_rate = 0.0;         // Conflict: probability of key 0
  std::uint64_t keys = 1000;          // Zipf: keyspace size
  double zipf_exponent = 1.0;
  std::uint32_t keys_per_command = 2; // Zipf
  std::uint32_t payload_size = 100;
  double get_ratio = 0.0;
  std::uint64_t commands_per_client = 0;  // 0 = unbounded
  Time duration = 0;                      // closed-loop clients stop issuing at this time

  // RoundRobin: `commands` commands on key 0, one every `interval`, cycling
  // through `sites`.
  std::uint64_t commands = 0;
  Time interval = millis(1);
  std::vector<std::uint16_t> sites;

  std::vector<ScriptedCommand> script;
};

struct ClockSeed {
  ProcessId process;
  Timestamp clock = 0;
};

struct Scenario {
  std::string name = "scenario";
  Topology topology;
  Config config;
  std::uint64_t seed = 1;
  PartitionMap partition_map = PartitionMap::Range;
  WorkloadSpec workload;
  NetworkSpec network;
  std::vector<CrashSpec> crashes;
  RandomCrashSpec random_crashes;
  std::vector<ClockSeed> initial_clocks;
  Time detection_period = millis(10);
  Time horizon = 0;  // 0 = derived from the workload
  bool check_liveness = true;
  bool self_test = false;  // forge a conflicting MCommit to exercise the checker

  /// Fills config.r from the topology and resolves the recovery timeout,
  /// then validates. Throws std::invalid_argument.
  void finalize();
};

}  // namespace tsr
