#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tsr/commit/clock.hpp"
#include "tsr/commit/environment.hpp"
#include "tsr/commit/messages.hpp"
#include "tsr/core/config.hpp"
#include "tsr/core/quorum.hpp"
#include "tsr/core/topology.hpp"
#include "tsr/execution/promise_table.hpp"
#include "tsr/recovery/ballot.hpp"

namespace tsr {

/// State only a coordinator or recovering leader of a command keeps.
struct LeaderState {
  std::map<ProcessId, Timestamp> propose_acks;
  std::vector<std::pair<ProcessId, PromiseBatchPtr>> ack_promises;
  bool proposal_decided = false;

  Ballot led_ballot = 0;  // ballot of the last MConsensus sent
  Timestamp led_ts = 0;
  CommitPath led_path = CommitPath::Slow;
  std::set<ProcessId> consensus_acks;

  Ballot rec_ballot = 0;  // ballot of the last MRec sent
  std::map<ProcessId, RecoveryAck> rec_acks;
};

/// Per-command state at one process. `ts` is this partition's proposal or
/// accepted value; `final_ts` is the committed timestamp used for execution.
struct CommandRecord {
  CommandPtr cmd;
  QuorumsPtr quorums;
  Timestamp ts = 0;
  Timestamp final_ts = 0;
  Phase phase = Phase::Start;
  Ballot bal = 0;
  Ballot abal = 0;

  std::vector<std::pair<PartitionId, Timestamp>> partition_commits;
  std::vector<PartitionId> stable_witnesses;  // other partitions that sent MStable
  bool stable_sent = false;

  std::vector<std::pair<ProcessId, Message>> parked;
  std::unique_ptr<LeaderState> leader;
  Time timer_due = 0;  // 0 = no command timer armed
};

/// One process: the replica of a single partition at a single site. Runs
/// commit, execution and recovery handlers to completion, one message at a
/// time. Self-addressed messages are handled right after the current handler,
/// before any other input.
class Replica {
 public:
  Replica(ProcessId self, const Config& config, const Topology& topology, Environment& env);

  const ProcessId& id() const { return self_; }

  /// Submits a new command; the caller's partition must be among `accesses`.
  /// Throws std::invalid_argument otherwise.
  CommandId submit(std::map<PartitionId, std::vector<Key>> accesses, OpKind op,
                   std::string payload);
  /// Id the next submit() will assign.
  CommandId next_command_id() const { return CommandId{self_, next_seq_}; }
  void deliver(const ProcessId& from, const Message& msg);
  /// Runs every timer due at env.now().
  void tick();
  /// Resends every promise issued so far to unsuspected peers.
  void on_suspicion_change();
  /// Raises the clock to `v` as if bumped, issuing detached promises 1..v.
  void seed_clock(Timestamp v);

  Timestamp clock() const { return clock_.value(); }
  Timestamp stable() const { return stable_; }
  const PromiseTable& promises() const { return table_; }
  const PartitionClock& partition_clock() const { return clock_; }
  const CommandRecord* record(const CommandId& id) const;
  const std::map<CommandId, CommandRecord>& records() const { return records_; }
  /// Current leader estimate of this partition.
  ProcessId leader() const;

 private:
  void dispatch(const ProcessId& from, const Message& msg);
  void process();
  void send(const ProcessId& to, const Message& msg);
  void send_all(const std::vector<ProcessId>& to, const Message& msg);
  std::vector<ProcessId> accessed_replicas(const Command& cmd) const;
  bool committed(const CommandId& id) const;
  void issued(const PromiseBatch& batch);
  void arm(CommandRecord& rec, const CommandId& id, Time when);
  void request_wake(Time when);
  void retry_parked(const CommandId& id);
  LeaderState& leader_state(CommandRecord& rec);
  void emit(ProtocolEvent ev);

  // commit
  void on_submit(const ProcessId& from, const MSubmit& m);
  void on_payload(const ProcessId& from, const MPayload& m);
  void on_propose(const ProcessId& from, const MPropose& m);
  void on_propose_ack(const ProcessId& from, const MProposeAck& m);
  void on_commit(const ProcessId& from, const MCommit& m);
  void on_consensus(const ProcessId& from, const MConsensus& m);
  void on_consensus_ack(const ProcessId& from, const MConsensusAck& m);
  void lead_consensus(const CommandId& id, CommandRecord& rec, Timestamp t, Ballot b,
                      CommitPath path);
  void commit(const CommandId& id, CommandRecord& rec);

  // execution
  void on_bump(const ProcessId& from, const MBump& m);
  void on_promises(const ProcessId& from, const MPromises& m);
  void on_stable(const ProcessId& from, const MStable& m);
  void ingest(const ProcessId& from, const PromiseBatch& batch);
  void flush_promises();
  void execution_step();

  // recovery
  void recover(const CommandId& id, CommandRecord& rec);
  void on_rec(const ProcessId& from, const MRec& m);
  void on_rec_ack(const ProcessId& from, const MRecAck& m);
  void on_rec_nack(const ProcessId& from, const MRecNAck& m);
  void on_commit_request(const ProcessId& from, const MCommitRequest& m);
  void on_command_timer(const CommandId& id);
  /// This partition's committed timestamp for `rec`, 0 when unknown.
  Timestamp own_commit(const CommandRecord& rec) const;

  ProcessId self_;
  const Config& config_;
  const Topology& topology_;
  Environment& env_;
  std::vector<ProcessId> peers_;  // replicas of this partition, self included

  std::uint64_t next_seq_ = 0;
  PartitionClock clock_;
  PromiseTable table_;
  Timestamp stable_ = 0;
  std::map<CommandId, CommandRecord> records_;
  std::set<std::pair<Timestamp, CommandId>> ready_;  // committed, not executed

  std::deque<Message> local_;
  Time flush_due_ = -1;
  std::set<std::pair<Time, CommandId>> timers_;
  std::set<Time> wakes_;
};

}  // namespace tsr
