#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tsr {

/// Logical timestamp. Zero means "unassigned"; committed timestamps are >= 1.
using Timestamp = std::uint64_t;

/// Consensus ballot number. Zero means "no ballot yet".
using Ballot = std::uint64_t;

/// Simulated time in microseconds.
using Time = std::int64_t;

constexpr Time kMicrosPerMilli = 1000;

constexpr Time millis(double ms) { return static_cast<Time>(ms * kMicrosPerMilli + (ms >= 0 ? 0.5 : -0.5)); }
constexpr double to_millis(Time t) { return static_cast<double>(t) / kMicrosPerMilli; }

using Key = std::uint64_t;

struct PartitionId {
  std::uint32_t index = 0;

  auto operator<=>(const PartitionId&) const = default;
};

/// A process replicates exactly one partition and lives at one site.
/// Processes are ordered by (partition, site).
struct ProcessId {
  std::uint16_t site = 0;
  PartitionId partition;

  /// 1-based position among the replicas of the partition, used for ballot
  /// ownership and leader election.
  std::uint32_t rank() const { return static_cast<std::uint32_t>(site) + 1; }

  friend bool operator==(const ProcessId&, const ProcessId&) = default;
  friend std::strong_ordering operator<=>(const ProcessId& a, const ProcessId& b) {
    if (auto c = a.partition <=> b.partition; c != 0) return c;
    return a.site <=> b.site;
  }
};

struct CommandId {
  ProcessId submitter;
  std::uint64_t seq = 0;

  friend bool operator==(const CommandId&, const CommandId&) = default;
  friend std::strong_ordering operator<=>(const CommandId& a, const CommandId& b) {
    if (auto c = a.submitter <=> b.submitter; c != 0) return c;
    return a.seq <=> b.seq;
  }
};

/// Three-way comparison used to break timestamp ties during execution.
std::strong_ordering id_order(const CommandId& a, const CommandId& b);

/// Returns (submitter, counter) and advances the counter.
CommandId next_id(const ProcessId& submitter, std::uint64_t& counter);

enum class OpKind : std::uint8_t { Put, Get };

struct Command {
  CommandId id;
  /// Partition -> keys accessed there. Never empty.
  std::map<PartitionId, std::vector<Key>> accesses;
  OpKind op = OpKind::Put;
  std::string payload;

  std::vector<PartitionId> partitions() const;
  bool accesses_partition(PartitionId p) const { return accesses.contains(p); }
};

using CommandPtr = std::shared_ptr<const Command>;

enum class Phase : std::uint8_t { Start, Payload, Propose, RecoverR, RecoverP, Commit, Execute };

std::string_view to_string(Phase phase);
bool is_pending(Phase phase);
bool is_committed(Phase phase);  // COMMIT or EXECUTE
/// True iff `from -> to` is an edge of the phase transition graph.
bool phase_transition_allowed(Phase from, Phase to);

std::string to_string(const ProcessId& p);
std::string to_string(const CommandId& id);
ProcessId parse_process(std::string_view text);
CommandId parse_command_id(std::string_view text);

}  // namespace tsr

template <>
struct std::hash<tsr::ProcessId> {
  std::size_t operator()(const tsr::ProcessId& p) const noexcept {
    return (static_cast<std::size_t>(p.partition.index) << 16) ^ p.site;
  }
};

template <>
struct std::hash<tsr::CommandId> {
  std::size_t operator()(const tsr::CommandId& id) const noexcept {
    return std::hash<tsr::ProcessId>{}(id.submitter) * 1000003u ^ std::hash<std::uint64_t>{}(id.seq);
  }
};
