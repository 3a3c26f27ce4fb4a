#include "tsr/commit/replica.hpp"

#include <algorithm>
#include <stdexcept>

#include "tsr/commit/fast_path.hpp"

namespace tsr {

Replica::Replica(ProcessId self, const Config& config, const Topology& topology,
                 Environment& env)
    : self_(self),
      config_(config),
      topology_(topology),
      env_(env),
      peers_(replicas_of(self.partition, config.r)),
      table_(config.r) {
  if (topology.size() != config.r) {
    throw std::invalid_argument("topology has " + std::to_string(topology.size()) +
                                " sites but r=" + std::to_string(config.r));
  }
  if (config.recovery_timeout <= 0) throw std::invalid_argument("recovery_timeout must be positive");
}

// ---------------------------------------------------------------------------
// plumbing

const CommandRecord* Replica::record(const CommandId& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

ProcessId Replica::leader() const {
  for (const auto& p : peers_) {
    if (p == self_ || !env_.suspects(self_, p)) return p;
  }
  return self_;
}

void Replica::send(const ProcessId& to, const Message& msg) {
  if (to == self_) {
    env_.on_local(self_, msg);
    local_.push_back(msg);
  } else {
    env_.send(self_, to, msg);
  }
}

void Replica::send_all(const std::vector<ProcessId>& to, const Message& msg) {
  for (const auto& p : to) send(p, msg);
}

std::vector<ProcessId> Replica::accessed_replicas(const Command& cmd) const {
  std::vector<ProcessId> out;
  for (const auto& [p, keys] : cmd.accesses) {
    auto reps = replicas_of(p, config_.r);
    out.insert(out.end(), reps.begin(), reps.end());
  }
  return out;
}

bool Replica::committed(const CommandId& id) const {
  auto it = records_.find(id);
  return it != records_.end() && is_committed(it->second.phase);
}

LeaderState& Replica::leader_state(CommandRecord& rec) {
  if (!rec.leader) rec.leader = std::make_unique<LeaderState>();
  return *rec.leader;
}

void Replica::emit(ProtocolEvent ev) { env_.on_protocol_event(self_, ev); }

void Replica::request_wake(Time when) {
  if (wakes_.insert(when).second) env_.wake_at(self_, when);
}

void Replica::arm(CommandRecord& rec, const CommandId& id, Time when) {
  if (rec.timer_due != 0 && rec.timer_due <= when) return;
  if (rec.timer_due != 0) timers_.erase({rec.timer_due, id});
  rec.timer_due = when;
  timers_.emplace(when, id);
  request_wake(when);
}

void Replica::retry_parked(const CommandId& id) {
  auto& rec = records_[id];
  if (rec.parked.empty()) return;
  auto parked = std::move(rec.parked);
  rec.parked.clear();
  for (const auto& [from, msg] : parked) dispatch(from, msg);
}

void Replica::dispatch(const ProcessId& from, const Message& msg) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MSubmit>) on_submit(from, m);
        else if constexpr (std::is_same_v<T, MPropose>) on_propose(from, m);
        else if constexpr (std::is_same_v<T, MPayload>) on_payload(from, m);
        else if constexpr (std::is_same_v<T, MProposeAck>) on_propose_ack(from, m);
        else if constexpr (std::is_same_v<T, MCommit>) on_commit(from, m);
        else if constexpr (std::is_same_v<T, MConsensus>) on_consensus(from, m);
        else if constexpr (std::is_same_v<T, MConsensusAck>) on_consensus_ack(from, m);
        else if constexpr (std::is_same_v<T, MBump>) on_bump(from, m);
        else if constexpr (std::is_same_v<T, MPromises>) on_promises(from, m);
        else if constexpr (std::is_same_v<T, MStable>) on_stable(from, m);
        else if constexpr (std::is_same_v<T, MRec>) on_rec(from, m);
        else if constexpr (std::is_same_v<T, MRecAck>) on_rec_ack(from, m);
        else if constexpr (std::is_same_v<T, MRecNAck>) on_rec_nack(from, m);
        else if constexpr (std::is_same_v<T, MCommitRequest>) on_commit_request(from, m);
      },
      msg);
}

void Replica::process() {
  do {
    while (!local_.empty()) {
      Message msg = std::move(local_.front());
      local_.pop_front();
      dispatch(self_, msg);
    }
    execution_step();
  } while (!local_.empty());
}

void Replica::deliver(const ProcessId& from, const Message& msg) {
  dispatch(from, msg);
  process();
}

void Replica::tick() {
  const Time now = env_.now();
  wakes_.erase(wakes_.begin(), wakes_.upper_bound(now));
  if (flush_due_ >= 0 && flush_due_ <= now) flush_promises();
  while (!timers_.empty() && timers_.begin()->first <= now) {
    auto [due, id] = *timers_.begin();
    timers_.erase(timers_.begin());
    auto& rec = records_[id];
    if (rec.timer_due != due) continue;
    rec.timer_due = 0;
    on_command_timer(id);
  }
  process();
}

void Replica::seed_clock(Timestamp v) {
  issued(clock_.bump(v));
  process();
}

// ---------------------------------------------------------------------------
// commit

CommandId Replica::submit(std::map<PartitionId, std::vector<Key>> accesses, OpKind op,
                          std::string payload) {
  if (!accesses.contains(self_.partition)) {
    throw std::invalid_argument("not-a-replica: " + to_string(self_) +
                                " does not replicate an accessed partition");
  }
  auto cmd = std::make_shared<Command>();
  cmd->id = next_id(self_, next_seq_);
  cmd->accesses = std::move(accesses);
  cmd->op = op;
  cmd->payload = std::move(payload);
  auto suspected = [this](const ProcessId& p) { return p != self_ && env_.suspects(self_, p); };
  auto qs = std::make_shared<const FastQuorumMap>(
      fast_quorums(self_, cmd->partitions(), topology_, config_, suspected));
  MSubmit m{cmd, qs};
  for (const auto& [p, quorum] : *qs) send(quorum.front(), m);
  process();
  return cmd->id;
}

void Replica::on_submit(const ProcessId&, const MSubmit& m) {
  const auto& quorum = m.qs->at(self_.partition);
  MPropose propose{m.cmd, m.qs, clock_.value() + 1};
  MPayload payload{m.cmd, m.qs};
  std::vector<ProcessId> rest;
  for (const auto& p : peers_) {
    if (std::find(quorum.begin(), quorum.end(), p) == quorum.end()) rest.push_back(p);
  }
  send_all(rest, payload);
  send_all(quorum, propose);
}

void Replica::on_payload(const ProcessId&, const MPayload& m) {
  auto& rec = records_[m.cmd->id];
  if (rec.phase != Phase::Start) return;
  rec.cmd = m.cmd;
  rec.quorums = m.qs;
  rec.phase = Phase::Payload;
  arm(rec, m.cmd->id, env_.now() + config_.recovery_timeout);
  retry_parked(m.cmd->id);
}

void Replica::on_propose(const ProcessId& from, const MPropose& m) {
  const CommandId id = m.cmd->id;
  auto& rec = records_[id];
  if (rec.phase != Phase::Start) return;
  rec.cmd = m.cmd;
  rec.quorums = m.qs;
  rec.phase = Phase::Propose;
  auto proposal = clock_.propose(id, m.t);
  rec.ts = proposal.ts;
  emit({.kind = ProtocolEvent::Kind::Proposal, .id = id, .ts = rec.ts});
  issued(proposal.issued);

  PromiseBatchPtr piggyback;
  if (config_.piggyback_promises) {
    piggyback = std::make_shared<const PromiseBatch>(std::move(proposal.issued));
  }
  send(from, MProposeAck{id, rec.ts, piggyback});
  if (config_.mbump) {
    for (const auto& [q, keys] : m.cmd->accesses) {
      if (q == self_.partition) continue;
      auto suspected = [this](const ProcessId& p) { return env_.suspects(self_, p); };
      send(closest_replica(self_.site, q, topology_, suspected), MBump{id, rec.ts});
    }
  }
  arm(rec, id, env_.now() + config_.recovery_timeout);
  retry_parked(id);
}

void Replica::on_propose_ack(const ProcessId& from, const MProposeAck& m) {
  if (m.promises && from != self_) ingest(from, *m.promises);
  auto& rec = records_[m.id];
  if (rec.phase != Phase::Propose || rec.quorums == nullptr) return;
  const auto& quorum = rec.quorums->at(self_.partition);
  if (quorum.front() != self_) return;
  auto& leader = leader_state(rec);
  if (leader.proposal_decided) return;
  if (std::find(quorum.begin(), quorum.end(), from) == quorum.end()) return;
  leader.propose_acks.emplace(from, m.t);
  if (m.promises) leader.ack_promises.emplace_back(from, m.promises);
  if (leader.propose_acks.size() < quorum.size()) return;

  leader.proposal_decided = true;
  std::vector<Timestamp> proposals;
  for (const auto& [j, t] : leader.propose_acks) proposals.push_back(t);
  auto decision = decide_proposal(proposals, config_.f);
  if (decision.fast) {
    emit({.kind = ProtocolEvent::Kind::Decide,
          .id = m.id,
          .ts = decision.ts,
          .detail = to_string(CommitPath::Fast)});
    MCommit commit{m.id, {{self_.partition, decision.ts}}, CommitPath::Fast, {}};
    if (config_.piggyback_promises) commit.promises = leader.ack_promises;
    send_all(accessed_replicas(*rec.cmd), commit);
  } else {
    lead_consensus(m.id, rec, decision.ts, self_.rank(), CommitPath::Slow);
  }
}

void Replica::lead_consensus(const CommandId& id, CommandRecord& rec, Timestamp t, Ballot b,
                             CommitPath path) {
  auto& leader = leader_state(rec);
  if (leader.led_ballot == b) return;  // one proposal per ballot
  leader.led_ballot = b;
  leader.led_ts = t;
  leader.led_path = path;
  leader.consensus_acks.clear();
  send_all(peers_, MConsensus{id, t, b});
}

void Replica::on_consensus(const ProcessId& from, const MConsensus& m) {
  auto& rec = records_[m.id];
  if (rec.bal > m.b) {
    send(from, MRecNAck{m.id, rec.bal});
    return;
  }
  rec.ts = m.t;
  rec.bal = m.b;
  rec.abal = m.b;
  issued(clock_.bump(m.t));
  send(from, MConsensusAck{m.id, m.b});
}

void Replica::on_consensus_ack(const ProcessId& from, const MConsensusAck& m) {
  auto& rec = records_[m.id];
  if (!rec.leader || rec.bal != m.b || rec.leader->led_ballot != m.b) return;
  auto& leader = *rec.leader;
  leader.consensus_acks.insert(from);
  if (leader.consensus_acks.size() != config_.slow_quorum_size()) return;
  emit({.kind = ProtocolEvent::Kind::Decide,
        .id = m.id,
        .ts = leader.led_ts,
        .ballot = m.b,
        .detail = to_string(leader.led_path)});
  MCommit commit{m.id, {{self_.partition, leader.led_ts}}, leader.led_path, {}};
  if (config_.piggyback_promises && leader.led_path == CommitPath::Slow) {
    commit.promises = leader.ack_promises;
  }
  if (rec.cmd) {
    send_all(accessed_replicas(*rec.cmd), commit);
  } else {
    send_all(peers_, commit);
  }
}

void Replica::on_commit(const ProcessId& from, const MCommit& m) {
  if (config_.piggyback_promises) {
    for (const auto& [j, batch] : m.promises) {
      if (j.partition == self_.partition && j != self_ && batch) ingest(j, *batch);
    }
  }
  auto& rec = records_[m.id];
  if (is_committed(rec.phase)) return;
  if (rec.phase == Phase::Start) {
    rec.parked.emplace_back(from, m);
    return;
  }
  for (const auto& [p, t] : m.commits) {
    if (!rec.cmd->accesses_partition(p)) continue;
    auto known = std::find_if(rec.partition_commits.begin(), rec.partition_commits.end(),
                              [&](const auto& e) { return e.first == p; });
    if (known == rec.partition_commits.end()) rec.partition_commits.emplace_back(p, t);
  }
  if (rec.partition_commits.size() == rec.cmd->accesses.size()) commit(m.id, rec);
}

void Replica::commit(const CommandId& id, CommandRecord& rec) {
  Timestamp final_ts = 0;
  Timestamp own = 0;
  for (const auto& [p, t] : rec.partition_commits) {
    final_ts = std::max(final_ts, t);
    if (p == self_.partition) own = t;
  }
  rec.final_ts = final_ts;
  rec.phase = Phase::Commit;
  rec.parked.clear();
  rec.leader.reset();
  table_.admit(id);
  emit({.kind = ProtocolEvent::Kind::Commit, .id = id, .ts = final_ts, .partition_ts = own});
  issued(clock_.bump(final_ts));
  ready_.emplace(final_ts, id);
}

}  // namespace tsr
