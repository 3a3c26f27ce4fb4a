#include "tsr/sim/simulator.hpp"

#include <algorithm>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace tsr {

namespace {

constexpr Time kNever = std::numeric_limits<Time>::max();
constexpr Time kDefaultTail = 60'000'000;     // 60 s after the workload ends
constexpr Time kUnboundedHorizon = 600'000'000;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

std::vector<PartitionId> partitions_of(const std::map<PartitionId, std::vector<Key>>& accesses) {
  std::vector<PartitionId> out;
  for (const auto& [p, keys] : accesses) out.push_back(p);
  return out;
}

}  // namespace

bool RunResult::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

Simulator::Simulator(const Scenario& scenario)
    : sc_(scenario),
      net_rng_(stream(scenario.seed, 1)),
      work_rng_(stream(scenario.seed, 2)),
      fault_rng_(stream(scenario.seed, 3)) {
  if (sc_.config.r != sc_.topology.size() || sc_.config.recovery_timeout <= 0) {
    throw std::invalid_argument("scenario not finalized");
  }
}

Simulator::~Simulator() = default;

const Replica* Simulator::replica(const ProcessId& p) const {
  auto it = procs_.find(p);
  return it == procs_.end() ? nullptr : it->second.replica.get();
}

const KvState* Simulator::kv(const ProcessId& p) const {
  auto it = procs_.find(p);
  return it == procs_.end() ? nullptr : &it->second.kv;
}

// ---------------------------------------------------------------------------
// plumbing

void Simulator::schedule(Time t, Event ev) {
  std::uint32_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
    slots_[slot] = std::move(ev);
  } else {
    slot = static_cast<std::uint32_t>(slots_.size());
    slots_.push_back(std::move(ev));
  }
  queue_.push(Queued{std::max(t, now_), seq_++, slot});
}

void Simulator::trace(TraceEvent ev) {
  ev.t = now_;
  hasher_.add(ev);
  checker_.consume(ev);
  if (trace_out_) *trace_out_ << to_json(ev).dump() << '\n';
  if (observer_) observer_(ev);
}

Simulator::Process& Simulator::process(const ProcessId& p) {
  auto [it, inserted] = procs_.try_emplace(p);
  if (inserted) it->second.replica = std::make_unique<Replica>(p, sc_.config, sc_.topology, *this);
  return it->second;
}

Time Simulator::crash_time(const ProcessId& p) const {
  Time t = kNever;
  if (!crashed_procs_.empty()) {
    if (auto it = crashed_procs_.find(p); it != crashed_procs_.end()) t = it->second;
  }
  if (!crashed_sites_.empty()) {
    if (auto it = crashed_sites_.find(p.site); it != crashed_sites_.end()) t = std::min(t, it->second);
  }
  return t;
}

bool Simulator::crashed(const ProcessId& p) const { return crash_time(p) <= now_; }

bool Simulator::suspects(const ProcessId& observer, const ProcessId& target) const {
  const Time t = crash_time(target);
  if (t == kNever) return false;
  return now_ >= t + 3 * sc_.detection_period + sc_.topology.one_way(target.site, observer.site);
}

std::optional<ProcessId> Simulator::choose_submitter(std::uint16_t site, PartitionId p) const {
  std::optional<ProcessId> best;
  for (const auto& q : replicas_of(p, sc_.config.r)) {
    if (crashed(q)) continue;
    if (!best || sc_.topology.rtt(site, q.site) < sc_.topology.rtt(site, best->site)) best = q;
  }
  return best;
}

Time Simulator::delay(const ProcessId& from, const ProcessId& to) {
  Time d = sc_.topology.one_way(from.site, to.site);
  if (sc_.network.jitter > 0) d += std::uniform_int_distribution<Time>(0, sc_.network.jitter)(net_rng_);
  if (sc_.network.reorder_extra > 0 && now_ < sc_.network.gst) {
    d += std::uniform_int_distribution<Time>(0, sc_.network.reorder_extra)(net_rng_);
  }
  return d;
}

bool Simulator::dropped(const ProcessId& from, const ProcessId& to, MsgType type) const {
  for (const auto& rule : sc_.network.drops) {
    if (rule.src && *rule.src != from) continue;
    if (rule.dst && *rule.dst != to) continue;
    if (rule.msg && *rule.msg != type) continue;
    if (now_ < rule.from || now_ >= rule.to) continue;
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// environment

void Simulator::send(const ProcessId& from, const ProcessId& to, const Message& msg) {
  TraceEvent ev{.kind = TraceKind::Send, .src = from, .dst = to};
  describe_message(msg, ev);
  trace(std::move(ev));
  ++result_.messages;
  if (dropped(from, to, type_of(msg))) return;
  schedule(now_ + delay(from, to), Event{.kind = EvKind::Deliver, .a = to, .b = from, .msg = msg});
}

void Simulator::on_local(const ProcessId& at, const Message& msg) {
  TraceEvent ev{.kind = TraceKind::Send, .src = at, .dst = at};
  describe_message(msg, ev);
  trace(std::move(ev));
}

void Simulator::wake_at(const ProcessId& who, Time when) {
  schedule(when, Event{.kind = EvKind::Wake, .a = who});
}

void Simulator::on_protocol_event(const ProcessId& at, const ProtocolEvent& pe) {
  TraceEvent ev{.src = at, .id = pe.id, .ts = pe.ts};
  switch (pe.kind) {
    case ProtocolEvent::Kind::Proposal: ev.kind = TraceKind::Proposal; break;
    case ProtocolEvent::Kind::Decide:
      ev.kind = TraceKind::Decide;
      ev.ballot = pe.ballot;
      ev.detail = std::string(pe.detail);
      if (pe.detail == "fast") {
        ++result_.fast;
      } else if (pe.detail == "slow") {
        ++result_.slow;
      } else {
        ++result_.recovery;
      }
      break;
    case ProtocolEvent::Kind::Commit:
      ev.kind = TraceKind::Commit;
      ev.partition_ts = pe.partition_ts;
      break;
    case ProtocolEvent::Kind::Stable:
      ev.kind = TraceKind::Stable;
      ev.id.reset();
      break;
    case ProtocolEvent::Kind::RecoveryStart:
      ev.kind = TraceKind::RecoveryStart;
      ev.ballot = pe.ballot;
      break;
    case ProtocolEvent::Kind::RecoveryDecision:
      ev.kind = TraceKind::Recovery;
      ev.ballot = pe.ballot;
      ev.detail = std::string(pe.detail);
      ev.members = pe.members;
      break;
  }
  trace(std::move(ev));

  if (pe.kind == ProtocolEvent::Kind::Commit) {
    auto it = pending_.find(pe.id);
    if (it != pending_.end() && it->second.submitter == at) {
      auto& stats = commands_[it->second.stats];
      if (stats.committed < 0) stats.committed = now_;
    }
  }

  if (pe.kind == ProtocolEvent::Kind::Decide && sc_.self_test && !forged_) {
    // Checker self-test: a second MCommit with a different timestamp.
    forged_ = true;
    const ProcessId to{static_cast<std::uint16_t>((at.site + 1) % sc_.config.r), at.partition};
    Message forged = MCommit{.id = pe.id, .commits = {{at.partition, pe.ts + 1}}, .path = CommitPath::Fast};
    send(at, to, forged);
  }
}

void Simulator::on_execute(const ProcessId& at, const Command& cmd, Timestamp ts) {
  process(at).kv.apply(at.partition, cmd);
  trace(TraceEvent{.kind = TraceKind::Exec, .src = at, .id = cmd.id, .ts = ts});

  auto it = pending_.find(cmd.id);
  if (it == pending_.end()) return;
  auto& pend = it->second;
  auto& stats = commands_[pend.stats];
  if (at == pend.submitter && stats.executed < 0) stats.executed = now_;
  if (pend.returned) return;

  // The reply travels from `at` to the client; the client returns once one
  // reply per accessed partition has arrived.
  const Time arrival = now_ + sc_.topology.one_way(at.site, stats.site);
  auto [slot, inserted] = pend.reply_at.emplace(at.partition, arrival);
  if (!inserted) {
    if (slot->second <= arrival) return;
    slot->second = arrival;
  }
  if (pend.reply_at.size() < pend.partitions.size()) return;
  Time done = 0;
  for (const auto& [p, t] : pend.reply_at) done = std::max(done, t);
  if (done >= pend.return_at) return;
  pend.return_at = done;
  schedule(done, Event{.kind = EvKind::Return, .id = cmd.id, .x = static_cast<std::uint64_t>(done)});
}

// ---------------------------------------------------------------------------
// workload and faults

void Simulator::setup() {
  const auto& w = sc_.workload;
  const std::uint32_t sites = static_cast<std::uint32_t>(sc_.config.r);
  const std::uint32_t total_clients =
      (w.kind == WorkloadKind::Conflict || w.kind == WorkloadKind::Zipf) ? w.clients_per_site * sites : 0;
  generator_ = std::make_unique<CommandGenerator>(w, sc_.partition_map, sc_.config.partitions, total_clients);

  Time workload_end = 0;
  bool unbounded = false;
  for (std::uint32_t c = 0; c < total_clients; ++c) {
    clients_.push_back(Client{.site = static_cast<std::uint16_t>(c / w.clients_per_site)});
    schedule(0, Event{.kind = EvKind::Issue, .x = c});
  }
  if (total_clients > 0) {
    if (w.duration > 0) {
      workload_end = w.duration;
    } else {
      unbounded = true;
    }
  }

  if (w.kind == WorkloadKind::RoundRobin) {
    std::vector<std::uint16_t> order = w.sites;
    if (order.empty()) {
      for (std::uint16_t s = 0; s < sites; ++s) order.push_back(s);
    }
    const PartitionId p = partition_of(0, sc_.partition_map, sc_.config.partitions, generator_->keyspace());
    for (std::uint64_t k = 0; k < w.commands; ++k) {
      Request req{.site = order[k % order.size()], .issued = static_cast<Time>(k) * w.interval,
                  .accesses = {{p, {Key{0}}}}};
      workload_end = std::max(workload_end, req.issued);
      requests_.push_back(std::move(req));
      schedule(requests_.back().issued, Event{.kind = EvKind::Arrive, .x = requests_.size() - 1});
    }
  }
  for (const auto& s : w.script) {
    requests_.push_back(Request{.site = s.site, .issued = s.at, .accesses = s.accesses, .op = s.op});
    workload_end = std::max(workload_end, s.at);
    schedule(s.at, Event{.kind = EvKind::Arrive, .x = requests_.size() - 1});
  }

  horizon_ = sc_.horizon > 0 ? sc_.horizon : (unbounded ? kUnboundedHorizon : workload_end + kDefaultTail);

  for (const auto& c : sc_.initial_clocks) process(c.process).replica->seed_clock(c.clock);

  for (const auto& c : sc_.crashes) {
    const ProcessId target{c.site, c.partition.value_or(PartitionId{0})};
    schedule(c.at, Event{.kind = EvKind::Crash, .a = target, .x = c.partition ? 0u : 1u});
  }
  const auto& rc = sc_.random_crashes;
  if (rc.per_partition > 0) {
    std::vector<PartitionId> parts = rc.partitions;
    if (parts.empty()) {
      for (std::uint32_t p = 0; p < sc_.config.partitions; ++p) parts.push_back(PartitionId{p});
    }
    for (auto p : parts) {
      std::vector<std::uint16_t> order(sites);
      for (std::uint16_t s = 0; s < sites; ++s) order[s] = s;
      std::shuffle(order.begin(), order.end(), fault_rng_);
      for (std::uint32_t k = 0; k < rc.per_partition; ++k) {
        const Time at = std::uniform_int_distribution<Time>(rc.from, rc.to)(fault_rng_);
        schedule(at, Event{.kind = EvKind::Crash, .a = ProcessId{order[k], p}});
      }
    }
  }
}

void Simulator::issue_client(std::uint64_t c) {
  auto& client = clients_[c];
  const auto& w = sc_.workload;
  if (client.stopped) return;
  if (w.duration > 0 && now_ >= w.duration) return;
  if (w.commands_per_client > 0 && client.issued >= w.commands_per_client) return;
  ++client.issued;
  requests_.push_back(Request{.client = static_cast<std::int64_t>(c), .site = client.site, .issued = now_,
                              .accesses = generator_->next(static_cast<std::uint32_t>(c), work_rng_),
                              .op = generator_->next_op(work_rng_)});
  start_request(requests_.size() - 1);
}

void Simulator::start_request(std::uint64_t r) {
  const auto& req = requests_[r];
  auto submitter = choose_submitter(req.site, req.accesses.begin()->first);
  if (!submitter) {
    if (req.client >= 0) clients_[static_cast<std::size_t>(req.client)].stopped = true;
    return;
  }
  if (submitter->site == req.site) {
    submit_request(*submitter, r);
  } else {
    schedule(now_ + sc_.topology.one_way(req.site, submitter->site),
             Event{.kind = EvKind::Submit, .a = *submitter, .x = r});
  }
}

void Simulator::submit_request(const ProcessId& submitter, std::uint64_t r) {
  auto& req = requests_[r];
  auto& rep = *process(submitter).replica;
  const CommandId id = rep.next_command_id();
  trace(TraceEvent{.kind = TraceKind::Submit, .src = submitter, .id = id,
                   .partitions = partitions_of(req.accesses)});
  commands_.push_back(CommandStats{.id = id, .site = req.site, .issued = req.issued,
                                   .partitions = static_cast<std::uint32_t>(req.accesses.size())});
  pending_.emplace(id, Pending{.stats = commands_.size() - 1, .client = req.client, .submitter = submitter,
                               .partitions = partitions_of(req.accesses)});
  std::string payload(sc_.workload.payload_size, static_cast<char>('a' + id.seq % 26));
  rep.submit(std::move(req.accesses), req.op, std::move(payload));
}

void Simulator::crash(const ProcessId& target, bool whole_site) {
  if (whole_site) {
    if (crashed_sites_.contains(target.site)) return;
    crashed_sites_.emplace(target.site, now_);
  } else {
    if (crashed(target)) return;
    crashed_procs_.emplace(target, now_);
  }
  trace(TraceEvent{.kind = TraceKind::Crash, .src = target, .flag = whole_site});

  // Every live replica sharing a partition with a crashed process is told
  // once its failure detector fires.
  std::vector<ProcessId> observers;
  for (const auto& [p, proc] : procs_) {
    if (p.site == target.site || crashed(p)) continue;
    if (whole_site || p.partition == target.partition) observers.push_back(p);
  }
  std::sort(observers.begin(), observers.end());
  for (const auto& p : observers) {
    schedule(now_ + 3 * sc_.detection_period + sc_.topology.one_way(target.site, p.site),
             Event{.kind = EvKind::Suspect, .a = p});
  }

  // Clients whose outstanding command sits at a crashed submitter stop.
  for (auto& [id, pend] : pending_) {
    if (pend.returned || pend.client < 0 || !crashed(pend.submitter)) continue;
    clients_[static_cast<std::size_t>(pend.client)].stopped = true;
  }
}

void Simulator::complete(const CommandId& id) {
  auto it = pending_.find(id);
  if (it == pending_.end() || it->second.returned) return;
  auto& pend = it->second;
  if (pend.client >= 0 && clients_[static_cast<std::size_t>(pend.client)].stopped) return;
  pend.returned = true;
  commands_[pend.stats].returned = now_;
  trace(TraceEvent{.kind = TraceKind::Return, .src = pend.submitter, .id = id});
  if (pend.client >= 0) issue_client(static_cast<std::uint64_t>(pend.client));
}

// ---------------------------------------------------------------------------
// main loop

RunResult Simulator::run() {
  trace(TraceEvent{.kind = TraceKind::Header, .r = sc_.config.r, .f = sc_.config.f,
                   .flag = sc_.check_liveness});
  setup();
  while (!queue_.empty()) {
    const Queued q = queue_.top();
    if (q.t > horizon_) break;
    queue_.pop();
    now_ = q.t;
    Event ev = std::move(slots_[q.slot]);
    slots_[q.slot] = Event{};
    free_slots_.push_back(q.slot);

    switch (ev.kind) {
      case EvKind::Deliver:
        if (!crashed(ev.a)) process(ev.a).replica->deliver(ev.b, ev.msg);
        break;
      case EvKind::Wake:
        if (!crashed(ev.a)) process(ev.a).replica->tick();
        break;
      case EvKind::Issue: issue_client(ev.x); break;
      case EvKind::Arrive: start_request(ev.x); break;
      case EvKind::Submit:
        if (!crashed(ev.a)) {
          submit_request(ev.a, ev.x);
        } else if (auto c = requests_[ev.x].client; c >= 0) {
          // Submitter died while the request was in flight.
          clients_[static_cast<std::size_t>(c)].stopped = true;
        }
        break;
      case EvKind::Crash: crash(ev.a, ev.x != 0); break;
      case EvKind::Suspect:
        if (!crashed(ev.a)) process(ev.a).replica->on_suspicion_change();
        break;
      case EvKind::Return: {
        auto it = pending_.find(ev.id);
        if (it != pending_.end() && it->second.return_at == static_cast<Time>(ev.x)) complete(ev.id);
        break;
      }
    }
  }
  if (!queue_.empty()) now_ = horizon_;
  trace(TraceEvent{.kind = TraceKind::End});

  result_.checks = checker_.finish();

  // Replicas of a partition that executed the same number of commands hold
  // equal state (their logs are equal by the log check).
  CheckResult kv{.name = "kv_state_equality"};
  std::map<std::pair<PartitionId, std::uint64_t>, ProcessId> reference;
  std::vector<ProcessId> order;
  for (const auto& [p, proc] : procs_) order.push_back(p);
  std::sort(order.begin(), order.end());
  for (const auto& p : order) {
    const auto& state = procs_.at(p).kv;
    auto [it, inserted] = reference.emplace(std::make_pair(p.partition, state.applied()), p);
    if (!inserted && !(procs_.at(it->second).kv == state)) {
      kv.status = CheckStatus::Fail;
      if (kv.violations.size() < RunChecker::kMaxViolations) {
        kv.violations.push_back({to_string(p) + " and " + to_string(it->second) +
                                     " diverge after " + std::to_string(state.applied()) + " commands",
                                 {}});
      }
    }
  }
  result_.checks.push_back(std::move(kv));

  result_.trace_hash = hasher_.hex();
  result_.trace_events = checker_.events();
  result_.end_time = now_;
  result_.horizon = horizon_;
  result_.commands = std::move(commands_);
  spdlog::debug("{}: {} events, {} messages, end at {} ms", sc_.name, result_.trace_events,
                result_.messages, to_millis(result_.end_time));
  return std::move(result_);
}

RunResult simulate(const Scenario& scenario, std::ostream* trace_out) {
  Simulator sim(scenario);
  sim.set_trace_output(trace_out);
  return sim.run();
}

}  // namespace tsr
