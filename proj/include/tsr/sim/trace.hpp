#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsr/commit/messages.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

enum class TraceKind : std::uint8_t {
  Header,    // r, f, liveness flag
  Send,      // one per destination; self-addressed sends included
  Proposal,  // fun_ts output at src
  Submit,    // client command handed to submitter src
  Decide,    // src sends MCommit for its partition; detail = path
  Commit,    // committed at src; ts = final, partition_ts = src's partition
  Stable,    // stable timestamp at src rose to ts
  Exec,      // executed at src
  Return,    // client observed completion of id
  Crash,     // src crashed (whole site when `site_crash`)
  RecoveryStart,
  Recovery,  // leader src chose ts at ballot; detail = branch; members = I
  End,
};

std::string_view to_string(TraceKind kind);
TraceKind parse_trace_kind(std::string_view name);

/// One line of the trace. Fields irrelevant to a kind keep their defaults and
/// are omitted from the JSON form.
struct TraceEvent {
  Time t = 0;
  TraceKind kind = TraceKind::Send;
  std::optional<ProcessId> src;
  std::optional<ProcessId> dst;
  std::optional<MsgType> msg;
  std::optional<CommandId> id;
  Timestamp ts = 0;
  Timestamp partition_ts = 0;
  Ballot ballot = 0;
  Ballot ab = 0;
  std::optional<Phase> phase;
  std::string detail;
  std::vector<PartitionId> partitions;                        // Submit
  std::vector<std::pair<PartitionId, Timestamp>> commits;     // Send of MCommit
  std::vector<ProcessId> members;                             // Recovery
  std::uint32_t r = 0;                                        // Header
  std::uint32_t f = 0;                                        // Header
  bool flag = false;  // Header: liveness expected; Crash: whole site
};

nlohmann::ordered_json to_json(const TraceEvent& ev);
/// Throws std::invalid_argument on malformed input.
TraceEvent trace_event_from_json(const nlohmann::json& j);

/// Fills message fields (type, id, ts, ballot, ...) of a Send event.
void describe_message(const Message& msg, TraceEvent& ev);

/// 64-bit FNV-1a over a canonical binary encoding of each event.
class TraceHasher {
 public:
  void add(const TraceEvent& ev);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  void bytes(const void* p, std::size_t n);
  template <typename T>
  void pod(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace tsr
