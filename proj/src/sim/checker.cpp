#include "tsr/sim/checker.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "tsr/recovery/ballot.hpp"

namespace tsr {

namespace {

constexpr const char* kValidity = "validity";
constexpr const char* kLogEquality = "log_equality";
constexpr const char* kExecOrder = "execution_order";
constexpr const char* kOrdering = "ordering_acyclic";
constexpr const char* kLiveness = "liveness";
constexpr const char* kAgree = "timestamp_agreement";
constexpr const char* kFinalAgree = "final_timestamp_agreement";
constexpr const char* kMajority = "majority_derived_timestamp";
constexpr const char* kFastRecoverable = "fast_path_recoverable";
constexpr const char* kStable = "stability_sound";
constexpr const char* kBallotOwner = "ballot_owner";
constexpr const char* kOneValue = "one_value_per_ballot";
constexpr const char* kAbBelow = "accepted_ballot_below_ballot";
constexpr const char* kAbReported = "accepted_ballot_reported";
constexpr const char* kChosenKept = "chosen_value_kept";
constexpr const char* kFastKept = "fast_value_kept";

std::string ts_str(Timestamp t) { return std::to_string(t); }

/// Calls `visit` with every k-subset of `items`.
void for_each_subset(const std::vector<Timestamp>& items, std::size_t k,
                     const std::function<void(const std::vector<Timestamp>&)>& visit) {
  std::vector<Timestamp> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      visit(cur);
      return;
    }
    for (std::size_t i = start; i + (k - cur.size()) <= items.size(); ++i) {
      cur.push_back(items[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "?";
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      kValidity,   kLogEquality,     kExecOrder, kOrdering,   kLiveness, kAgree,
      kFinalAgree, kMajority,        kFastRecoverable, kStable, kBallotOwner, kOneValue,
      kAbBelow,    kAbReported,      kChosenKept, kFastKept};
  return names;
}

void RunChecker::fail(const std::string& check, std::string message,
                      std::vector<std::uint64_t> events) {
  auto& res = results_[check];
  res.status = CheckStatus::Fail;
  if (res.violations.size() < kMaxViolations) {
    res.violations.push_back({std::move(message), std::move(events)});
  } else {
    ++dropped_[check];
  }
}

std::uint32_t RunChecker::node(const CommandId& id) {
  auto [it, inserted] = nodes_.emplace(id, node_count_);
  if (inserted) ++node_count_;
  return it->second;
}

void RunChecker::consume(const TraceEvent& ev) {
  switch (ev.kind) {
    case TraceKind::Header:
      r_ = ev.r;
      f_ = ev.f;
      liveness_expected_ = ev.flag;
      break;
    case TraceKind::Send: on_send(ev); break;
    case TraceKind::Proposal: on_proposal(ev); break;
    case TraceKind::Decide: on_decide(ev); break;
    case TraceKind::Commit: on_commit(ev); break;
    case TraceKind::Stable:
      if (ev.src) stable_[*ev.src] = {ev.ts, index_};
      break;
    case TraceKind::Exec: on_exec(ev); break;
    case TraceKind::Submit:
      if (ev.id && ev.src) {
        submitted_.emplace(*ev.id, index_);
        submitter_.emplace(*ev.id, *ev.src);
        auto& parts = submit_partitions_[*ev.id];
        for (auto p : ev.partitions) parts.push_back(p.index);
        std::uint32_t d = node(*ev.id);
        if (last_return_node_ >= 0) edges_.emplace_back(static_cast<std::uint32_t>(last_return_node_), d);
      }
      break;
    case TraceKind::Return:
      if (ev.id) {
        // Chain node standing for "everything returned so far".
        std::uint32_t chain = node_count_++;
        edges_.emplace_back(node(*ev.id), chain);
        if (last_return_node_ >= 0) edges_.emplace_back(static_cast<std::uint32_t>(last_return_node_), chain);
        last_return_node_ = chain;
      }
      break;
    case TraceKind::Crash:
      if (ev.src) {
        if (ev.flag) {
          crashed_sites_.insert(ev.src->site);
        } else {
          crashed_.insert(*ev.src);
        }
      }
      break;
    case TraceKind::End: ended_ = true; break;
    case TraceKind::RecoveryStart:
    case TraceKind::Recovery: break;
  }
  ++index_;
}

void RunChecker::on_proposal(const TraceEvent& ev) {
  if (!ev.src || !ev.id) return;
  proposals_[{*ev.id, ev.src->partition.index}].emplace(*ev.src, ev.ts);
}

void RunChecker::on_send(const TraceEvent& ev) {
  if (!ev.msg || !ev.src || !ev.id) return;
  const ProcessId& src = *ev.src;
  const Key key{*ev.id, src.partition.index};
  switch (*ev.msg) {
    case MsgType::ProposeAck:
      if (ev.dst) propose_acks_[{*ev.id, *ev.dst}].emplace(src, ev.ts);
      break;
    case MsgType::Commit:
      for (const auto& [p, t] : ev.commits) {
        Key k{*ev.id, p.index};
        auto [it, inserted] = committed_ts_.emplace(k, std::make_pair(t, index_));
        if (!inserted && it->second.first != t) {
          fail(kAgree,
               "MCommit for " + to_string(*ev.id) + " partition " + std::to_string(p.index) +
                   " carries " + ts_str(t) + " after " + ts_str(it->second.first),
               {it->second.second, index_});
        }
      }
      break;
    case MsgType::Consensus: {
      if (r_ != 0) {
        const bool owner = ev.ballot >= 1 && bal_leader(ev.ballot, r_) == src.rank();
        if (!owner || !(ev.ballot == src.rank() || ev.ballot > r_)) {
          fail(kBallotOwner, "MConsensus ballot " + std::to_string(ev.ballot) + " sent by " + to_string(src),
               {index_});
        }
      }
      auto& by_ballot = consensus_[key];
      auto [it, inserted] = by_ballot.emplace(ev.ballot, std::make_pair(ev.ts, index_));
      if (!inserted && it->second.first != ev.ts) {
        fail(kOneValue,
             "ballot " + std::to_string(ev.ballot) + " of " + to_string(*ev.id) + " carries " +
                 ts_str(ev.ts) + " and " + ts_str(it->second.first),
             {it->second.second, index_});
      }
      if (auto ch = chosen_.find(key); ch != chosen_.end()) {
        for (const auto& [b, t] : ch->second) {
          if (b < ev.ballot && t != ev.ts) {
            fail(kChosenKept,
                 "ballot " + std::to_string(ev.ballot) + " proposes " + ts_str(ev.ts) +
                     " but ballot " + std::to_string(b) + " chose " + ts_str(t),
                 {index_});
          }
        }
      }
      if (auto fc = fast_commits_.find(key); fc != fast_commits_.end() && fc->second.first != ev.ts) {
        fail(kFastKept,
             "MConsensus " + ts_str(ev.ts) + " after fast commit " + ts_str(fc->second.first) +
                 " of " + to_string(*ev.id),
             {fc->second.second, index_});
      }
      break;
    }
    case MsgType::ConsensusAck: {
      auto& acked = acked_ballot_[{key, src}];
      acked = std::max(acked, ev.ballot);
      auto& acks = consensus_acks_[key][ev.ballot];
      acks.insert(src);
      if (f_ != 0 && acks.size() == f_ + 1) {
        auto c = consensus_.find(key);
        if (c == consensus_.end() || !c->second.contains(ev.ballot)) break;
        const Timestamp t = c->second.at(ev.ballot).first;
        chosen_[key][ev.ballot] = t;
        for (const auto& [b, sent] : c->second) {
          if (b > ev.ballot && sent.first != t) {
            fail(kChosenKept,
                 "ballot " + std::to_string(b) + " proposed " + ts_str(sent.first) +
                     " but ballot " + std::to_string(ev.ballot) + " chose " + ts_str(t),
                 {sent.second, index_});
          }
        }
      }
      break;
    }
    case MsgType::RecAck: {
      if (ev.ab >= ev.ballot) {
        fail(kAbBelow,
             "MRecAck ab=" + std::to_string(ev.ab) + " not below b=" + std::to_string(ev.ballot),
             {index_});
      }
      auto it = acked_ballot_.find({key, src});
      if (it != acked_ballot_.end() && ev.ballot > it->second && ev.ab < it->second) {
        fail(kAbReported,
             to_string(src) + " acked ballot " + std::to_string(it->second) +
                 " but reports ab=" + std::to_string(ev.ab) + " at ballot " +
                 std::to_string(ev.ballot),
             {index_});
      }
      break;
    }
    default: break;
  }
}

void RunChecker::on_decide(const TraceEvent& ev) {
  if (!ev.src || !ev.id) return;
  const ProcessId& src = *ev.src;
  const Key key{*ev.id, src.partition.index};
  const Timestamp t = ev.ts;

  // t is the maximum of fun_ts outputs at some majority.
  if (r_ != 0) {
    auto it = proposals_.find(key);
    std::size_t at_most = 0;
    bool present = false;
    if (it != proposals_.end()) {
      for (const auto& [j, out] : it->second) {
        at_most += out <= t;
        present = present || out == t;
      }
    }
    if (!present || at_most < r_ / 2 + 1) {
      fail(kMajority,
           "commit " + ts_str(t) + " of " + to_string(*ev.id) +
               " is not the maximum proposal of a majority",
           {index_});
    }
  }

  if (ev.detail != "fast") return;
  fast_commits_.emplace(key, std::make_pair(t, index_));
  if (auto c = consensus_.find(key); c != consensus_.end()) {
    for (const auto& [b, sent] : c->second) {
      if (sent.first != t) {
        fail(kFastKept,
             "MConsensus " + ts_str(sent.first) + " contradicts fast commit " + ts_str(t) +
                 " of " + to_string(*ev.id),
             {sent.second, index_});
      }
    }
  }

  // Every floor(r/2) fast-quorum members other than the
  // coordinator recover t.
  if (r_ == 0) return;
  auto acks = propose_acks_.find({*ev.id, src});
  if (acks == propose_acks_.end()) return;
  std::vector<Timestamp> others;
  for (const auto& [j, p] : acks->second) {
    if (j != src) others.push_back(p);
  }
  const std::size_t k = r_ / 2;
  if (others.size() < k) {
    fail(kFastRecoverable, "fast commit of " + to_string(*ev.id) + " with too few quorum members", {index_});
    return;
  }
  bool ok = true;
  for_each_subset(others, k, [&](const std::vector<Timestamp>& subset) {
    if (*std::max_element(subset.begin(), subset.end()) != t) ok = false;
  });
  if (!ok) {
    fail(kFastRecoverable,
         "fast commit " + ts_str(t) + " of " + to_string(*ev.id) +
             " not recoverable from every " + std::to_string(k) + " non-coordinator members",
         {index_});
  }
}

void RunChecker::on_commit(const TraceEvent& ev) {
  if (!ev.src || !ev.id) return;
  auto [it, inserted] = final_ts_.emplace(*ev.id, std::make_pair(ev.ts, index_));
  if (!inserted && it->second.first != ev.ts) {
    fail(kFinalAgree,
         to_string(*ev.src) + " commits " + to_string(*ev.id) + " at " + ts_str(ev.ts) +
             " but another process used " + ts_str(it->second.first),
         {it->second.second, index_});
  }
  auto st = stable_.find(*ev.src);
  if (st != stable_.end() && ev.partition_ts <= st->second.first) {
    fail(kStable,
         to_string(*ev.src) + " commits " + to_string(*ev.id) + " at " +
             ts_str(ev.partition_ts) + " after " + ts_str(st->second.first) + " became stable",
         {st->second.second, index_});
  }
}

void RunChecker::on_exec(const TraceEvent& ev) {
  if (!ev.src || !ev.id) return;
  const ProcessId& at = *ev.src;
  const CommandId& id = *ev.id;

  if (!submitted_.contains(id)) {
    fail(kValidity, to_string(at) + " executes unsubmitted " + to_string(id), {index_});
  }
  if (!executed_at_[at].insert(id).second) {
    fail(kValidity, to_string(at) + " executes " + to_string(id) + " twice", {index_});
  }

  auto last = last_exec_.find(at);
  std::pair<Timestamp, CommandId> cur{ev.ts, id};
  if (last != last_exec_.end() && !(last->second < cur)) {
    fail(kExecOrder,
         to_string(at) + " executes (" + ts_str(ev.ts) + ", " + to_string(id) + ") after (" +
             ts_str(last->second.first) + ", " + to_string(last->second.second) + ")",
         {index_});
  }
  last_exec_[at] = cur;

  auto& log = partition_log_[at.partition.index];
  auto& pos = exec_count_[at];
  if (pos < log.size()) {
    if (log[pos].first != id) {
      fail(kLogEquality,
           to_string(at) + " executes " + to_string(id) + " at position " + std::to_string(pos) +
               " where another replica executed " + to_string(log[pos].first),
           {log[pos].second, index_});
    }
  } else {
    log.emplace_back(id, index_);
  }
  ++pos;

  std::uint32_t n = node(id);
  if (auto prev = last_exec_node_.find(at); prev != last_exec_node_.end()) {
    edges_.emplace_back(prev->second, n);
  }
  last_exec_node_[at] = n;
}

std::vector<CheckResult> RunChecker::finish() {
  // Ordering: the union of execution and real-time precedence is acyclic.
  {
    std::vector<std::uint32_t> indegree(node_count_, 0);
    std::vector<std::vector<std::uint32_t>> out(node_count_);
    for (const auto& [a, b] : edges_) {
      if (a == b) continue;
      out[a].push_back(b);
      ++indegree[b];
    }
    std::deque<std::uint32_t> ready;
    for (std::uint32_t v = 0; v < node_count_; ++v) {
      if (indegree[v] == 0) ready.push_back(v);
    }
    std::uint32_t seen = 0;
    while (!ready.empty()) {
      auto v = ready.front();
      ready.pop_front();
      ++seen;
      for (auto w : out[v]) {
        if (--indegree[w] == 0) ready.push_back(w);
      }
    }
    if (seen != node_count_) {
      std::vector<CommandId> cyclic;
      for (const auto& [id, v] : nodes_) {
        if (indegree[v] != 0) cyclic.push_back(id);
      }
      std::sort(cyclic.begin(), cyclic.end());
      std::string list;
      for (std::size_t i = 0; i < cyclic.size() && i < 8; ++i) list += " " + to_string(cyclic[i]);
      fail(kOrdering, std::to_string(node_count_ - seen) + " nodes on or behind a cycle:" + list, {});
    }
  }

  // Liveness: every command of a live submitter executes at every live
  // replica of its partitions.
  auto is_crashed = [&](const ProcessId& p) {
    return crashed_.contains(p) || crashed_sites_.contains(p.site);
  };
  if (!liveness_expected_) {
    results_[kLiveness].status = CheckStatus::Skipped;
    results_[kLiveness].note = "not expected by the scenario";
  } else {
    std::map<std::uint32_t, std::uint32_t> crashes_per_partition;
    std::set<std::uint32_t> touched;
    for (const auto& [id, parts] : submit_partitions_) touched.insert(parts.begin(), parts.end());
    bool insufficient = false;
    for (auto p : touched) {
      std::uint32_t n = 0;
      for (std::uint32_t s = 0; s < r_; ++s) {
        n += is_crashed(ProcessId{static_cast<std::uint16_t>(s), PartitionId{p}});
      }
      insufficient = insufficient || n > f_;
    }
    if (insufficient) {
      results_[kLiveness].status = CheckStatus::Skipped;
      results_[kLiveness].note = "insufficient replicas";
    } else {
      std::vector<std::pair<CommandId, std::uint64_t>> ordered(submitted_.begin(), submitted_.end());
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });
      for (const auto& [id, ev_index] : ordered) {
        if (is_crashed(submitter_.at(id))) continue;
        for (auto p : submit_partitions_.at(id)) {
          for (std::uint32_t s = 0; s < r_; ++s) {
            ProcessId q{static_cast<std::uint16_t>(s), PartitionId{p}};
            if (is_crashed(q)) continue;
            auto it = executed_at_.find(q);
            if (it == executed_at_.end() || !it->second.contains(id)) {
              fail(kLiveness, to_string(id) + " never executed at " + to_string(q), {ev_index});
            }
          }
        }
      }
    }
  }

  std::vector<CheckResult> out;
  for (const auto& name : check_names()) {
    CheckResult res = results_[name];
    res.name = name;
    if (auto d = dropped_.find(name); d != dropped_.end()) {
      res.note = std::to_string(d->second) + " further violations omitted";
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace tsr
