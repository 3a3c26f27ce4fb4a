#include <algorithm>

#include "tsr/commit/replica.hpp"

namespace tsr {

void Replica::issued(const PromiseBatch& batch) {
  if (batch.empty()) return;
  table_.ingest(self_.site, batch, [this](const CommandId& id) { return committed(id); });
  if (flush_due_ < 0) {
    const Time now = env_.now();
    flush_due_ = (now / config_.promise_period + 1) * config_.promise_period;
    request_wake(flush_due_);
  }
}

void Replica::ingest(const ProcessId& from, const PromiseBatch& batch) {
  table_.ingest(from.site, batch, [this](const CommandId& id) { return committed(id); });
  // Promises attached to commands not committed here: ask for the commit
  // if it does not show up within the recovery timeout.
  for (const auto& a : batch.attached) {
    auto& rec = records_[a.id];
    if (!is_committed(rec.phase) && rec.timer_due == 0) {
      arm(rec, a.id, env_.now() + config_.recovery_timeout);
    }
  }
}

void Replica::flush_promises() {
  flush_due_ = -1;
  if (!clock_.has_unsent()) return;
  auto batch = std::make_shared<const PromiseBatch>(clock_.take_unsent());
  MPromises m{batch};
  for (const auto& p : peers_) {
    if (p != self_) send(p, m);
  }
}

void Replica::on_suspicion_change() {
  auto batch = std::make_shared<const PromiseBatch>(clock_.all_issued());
  if (!batch->empty()) {
    MPromises m{batch};
    for (const auto& p : peers_) {
      if (p != self_ && !env_.suspects(self_, p)) send(p, m);
    }
  }
  process();
}

void Replica::on_promises(const ProcessId& from, const MPromises& m) {
  if (from.partition != self_.partition || from == self_ || !m.promises) return;
  ingest(from, *m.promises);
}

void Replica::on_bump(const ProcessId& from, const MBump& m) {
  auto& rec = records_[m.id];
  if (rec.phase == Phase::Start) {
    rec.parked.emplace_back(from, m);
    return;
  }
  if (rec.phase != Phase::Propose) return;
  issued(clock_.bump(m.t));
}

void Replica::on_stable(const ProcessId& from, const MStable& m) {
  auto& rec = records_[m.id];
  if (from.partition != self_.partition &&
      std::find(rec.stable_witnesses.begin(), rec.stable_witnesses.end(), from.partition) ==
          rec.stable_witnesses.end()) {
    rec.stable_witnesses.push_back(from.partition);
  }
  if (m.reply_requested && rec.stable_sent) send(from, MStable{m.id, false});
}

void Replica::execution_step() {
  const Timestamp s = table_.stable();
  if (s > stable_) {
    stable_ = s;
    emit({.kind = ProtocolEvent::Kind::Stable, .ts = s});
  }
  while (!ready_.empty()) {
    const auto [ts, id] = *ready_.begin();
    if (ts > stable_) break;
    auto& rec = records_[id];
    const auto& cmd = *rec.cmd;
    if (cmd.accesses.size() > 1) {
      if (!rec.stable_sent) {
        rec.stable_sent = true;
        for (const auto& p : accessed_replicas(cmd)) {
          if (p.partition != self_.partition) send(p, MStable{id, false});
        }
        arm(rec, id, env_.now() + config_.recovery_timeout);
      }
      if (rec.stable_witnesses.size() + 1 < cmd.accesses.size()) break;
    }
    ready_.erase(ready_.begin());
    rec.phase = Phase::Execute;
    env_.on_execute(self_, cmd, ts);
  }
}

}  // namespace tsr
