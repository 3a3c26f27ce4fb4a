#include <algorithm>

#include "tsr/commit/replica.hpp"

namespace tsr {

Timestamp Replica::own_commit(const CommandRecord& rec) const {
  for (const auto& [p, t] : rec.partition_commits) {
    if (p == self_.partition) return t;
  }
  return 0;
}

void Replica::recover(const CommandId& id, CommandRecord& rec) {
  if (!is_pending(rec.phase) || own_commit(rec) != 0) return;
  const Ballot b = recover_ballot(self_.rank(), rec.bal, config_.r);
  auto& leader = leader_state(rec);
  leader.rec_ballot = b;
  leader.rec_acks.clear();
  emit({.kind = ProtocolEvent::Kind::RecoveryStart, .id = id, .ballot = b});
  send_all(peers_, MRec{id, b});
}

void Replica::on_rec(const ProcessId& from, const MRec& m) {
  auto& rec = records_[m.id];
  if (is_committed(rec.phase)) return;
  if (rec.phase == Phase::Start) {
    rec.parked.emplace_back(from, m);
    return;
  }
  if (const Timestamp t = own_commit(rec); t != 0) {
    // This partition already decided; a pending multi-partition command
    // must not re-enter consensus here.
    send(from, MCommit{m.id, {{self_.partition, t}}, CommitPath::Reply, {}});
    return;
  }
  if (rec.bal >= m.b) {
    // Equal ballots are echoed back only by processes that do not own them.
    if (rec.bal > m.b || bal_leader(m.b, config_.r) != self_.rank()) {
      send(from, MRecNAck{m.id, rec.bal});
    }
    return;
  }
  if (rec.bal == 0) {
    if (rec.phase == Phase::Payload) {
      auto proposal = clock_.propose(m.id, 0);
      rec.ts = proposal.ts;
      rec.phase = Phase::RecoverR;
      emit({.kind = ProtocolEvent::Kind::Proposal, .id = m.id, .ts = rec.ts});
      issued(proposal.issued);
    } else if (rec.phase == Phase::Propose) {
      rec.phase = Phase::RecoverP;
    }
  }
  rec.bal = m.b;
  send(from, MRecAck{m.id, rec.ts, rec.phase, rec.abal, m.b});
}

void Replica::on_rec_ack(const ProcessId& from, const MRecAck& m) {
  auto& rec = records_[m.id];
  if (rec.bal != m.b || !is_pending(rec.phase) || !rec.leader || own_commit(rec) != 0) return;
  auto& leader = *rec.leader;
  if (leader.rec_ballot != m.b || leader.led_ballot == m.b) return;
  leader.rec_acks.emplace(from, RecoveryAck{m.t, m.phase, m.ab});
  if (leader.rec_acks.size() != config_.recovery_quorum_size()) return;
  const auto& quorum = rec.quorums->at(self_.partition);
  auto choice = choose_recovery_timestamp(leader.rec_acks, quorum);
  emit({.kind = ProtocolEvent::Kind::RecoveryDecision,
        .id = m.id,
        .ts = choice.ts,
        .ballot = m.b,
        .detail = to_string(choice.branch),
        .members = choice.intersection});
  lead_consensus(m.id, rec, choice.ts, m.b, CommitPath::Recovery);
}

void Replica::on_rec_nack(const ProcessId&, const MRecNAck& m) {
  auto& rec = records_[m.id];
  if (leader() != self_ || rec.bal >= m.b) return;
  rec.bal = m.b;
  recover(m.id, rec);
}

void Replica::on_commit_request(const ProcessId& from, const MCommitRequest& m) {
  auto it = records_.find(m.id);
  if (it == records_.end() || !is_committed(it->second.phase)) return;
  const auto& rec = it->second;
  send(from, MPayload{rec.cmd, rec.quorums});
  send(from, MCommit{m.id, rec.partition_commits, CommitPath::Reply, {}});
}

void Replica::on_command_timer(const CommandId& id) {
  auto& rec = records_[id];
  const Time next = env_.now() + config_.recovery_timeout;
  if (rec.phase == Phase::Execute) return;
  if (rec.phase == Phase::Commit) {
    if (!rec.stable_sent) return;
    for (const auto& p : accessed_replicas(*rec.cmd)) {
      if (p.partition == self_.partition) continue;
      if (std::find(rec.stable_witnesses.begin(), rec.stable_witnesses.end(), p.partition) !=
          rec.stable_witnesses.end()) {
        continue;
      }
      send(p, MStable{id, true});
    }
    arm(rec, id, next);
    return;
  }
  if (is_pending(rec.phase)) {
    const auto targets = accessed_replicas(*rec.cmd);
    MPayload payload{rec.cmd, rec.quorums};
    for (const auto& p : targets) {
      if (p != self_) send(p, payload);
    }
    if (leader() == self_ &&
        (rec.bal == 0 || bal_leader(rec.bal, config_.r) != self_.rank())) {
      recover(id, rec);
    }
    for (const auto& p : targets) {
      if (p != self_) send(p, MCommitRequest{id});
    }
    arm(rec, id, next);
    return;
  }
  // START: only promises attached to this command are known here.
  if (table_.has_buffered(id)) {
    for (const auto& p : peers_) {
      if (p != self_) send(p, MCommitRequest{id});
    }
    arm(rec, id, next);
  }
}

}  // namespace tsr
