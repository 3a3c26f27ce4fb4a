#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsr/commit/messages.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

/// Local protocol occurrences that are not messages, reported for tracing
/// and monitoring.
struct ProtocolEvent {
  enum class Kind : std::uint8_t {
    Proposal,          // fun_ts output
    Decide,            // coordinator or recoverer sends MCommit for its partition
    Commit,            // command committed locally
    Stable,            // local stable timestamp increased
    RecoveryStart,     // MRec broadcast
    RecoveryDecision,  // timestamp chosen from MRecAcks
  };
  Kind kind = Kind::Proposal;
  CommandId id;
  Timestamp ts = 0;            // proposal, final, stable or chosen timestamp
  Timestamp partition_ts = 0;  // Commit: this partition's committed timestamp
  Ballot ballot = 0;
  std::string_view detail;     // commit path or recovery branch
  std::vector<ProcessId> members;  // RecoveryDecision: recovery quorum members in the fast quorum
};

/// Everything a replica needs from the outside world.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Time now() const = 0;
  /// Remote delivery. Self-addressed messages never reach the environment.
  virtual void send(const ProcessId& from, const ProcessId& to, const Message& msg) = 0;
  /// Called for each self-addressed message when it is sent.
  virtual void on_local(const ProcessId& /*at*/, const Message& /*msg*/) {}
  /// Requests a call to Replica::tick at or after `when`.
  virtual void wake_at(const ProcessId& who, Time when) = 0;
  virtual bool suspects(const ProcessId& observer, const ProcessId& target) const = 0;
  virtual void on_protocol_event(const ProcessId& /*at*/, const ProtocolEvent& /*ev*/) {}
  /// Applies `cmd` at `at`; called in execution order.
  virtual void on_execute(const ProcessId& at, const Command& cmd, Timestamp ts) = 0;
};

}  // namespace tsr
