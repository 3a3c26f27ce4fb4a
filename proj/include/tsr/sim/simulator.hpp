#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsr/commit/environment.hpp"
#include "tsr/commit/replica.hpp"
#include "tsr/kv/kv_state.hpp"
#include "tsr/sim/checker.hpp"
#include "tsr/sim/scenario.hpp"
#include "tsr/sim/trace.hpp"
#include "tsr/sim/workload.hpp"

namespace tsr {

/// Life of one client command. Times are absolute; -1 = never happened.
struct CommandStats {
  CommandId id;
  std::uint16_t site = 0;  // client site
  Time issued = 0;
  Time committed = -1;  // at the submitter
  Time executed = -1;   // at the submitter
  Time returned = -1;
  std::uint32_t partitions = 1;
};

struct RunResult {
  std::vector<CheckResult> checks;
  std::string trace_hash;
  std::uint64_t trace_events = 0;
  std::uint64_t messages = 0;
  std::uint64_t fast = 0;
  std::uint64_t slow = 0;
  std::uint64_t recovery = 0;
  Time end_time = 0;
  Time horizon = 0;
  std::vector<CommandStats> commands;

  bool passed() const;
};

/// Deterministic discrete-event simulation of one scenario. Replicas take
/// zero processing time; a message takes half the RTT between its sites plus
/// the configured jitter and pre-GST extra delay.
class Simulator final : public Environment {
 public:
  explicit Simulator(const Scenario& scenario);
  ~Simulator() override;

  /// Streams every trace event as one JSON line.
  void set_trace_output(std::ostream* out) { trace_out_ = out; }
  /// Called for every trace event, after the checker.
  void set_observer(std::function<void(const TraceEvent&)> fn) { observer_ = std::move(fn); }

  RunResult run();

  const Replica* replica(const ProcessId& p) const;
  const KvState* kv(const ProcessId& p) const;

  // Environment
  Time now() const override { return now_; }
  void send(const ProcessId& from, const ProcessId& to, const Message& msg) override;
  void on_local(const ProcessId& at, const Message& msg) override;
  void wake_at(const ProcessId& who, Time when) override;
  bool suspects(const ProcessId& observer, const ProcessId& target) const override;
  void on_protocol_event(const ProcessId& at, const ProtocolEvent& ev) override;
  void on_execute(const ProcessId& at, const Command& cmd, Timestamp ts) override;

 private:
  enum class EvKind : std::uint8_t { Deliver, Wake, Issue, Arrive, Submit, Crash, Suspect, Return };
  struct Event {
    EvKind kind = EvKind::Wake;
    ProcessId a;  // Deliver: dst; Wake/Suspect: process; Submit: submitter; Crash: target
    ProcessId b;  // Deliver: src
    Message msg;  // Deliver
    CommandId id;  // Return
    std::uint64_t x = 0;  // Issue: client; Arrive/Submit: request; Return: time; Crash: whole site
  };
  struct Queued {
    Time t;
    std::uint64_t seq;
    std::uint32_t slot;
    bool operator>(const Queued& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };
  struct Process {
    std::unique_ptr<Replica> replica;
    KvState kv;
  };
  struct Client {
    std::uint16_t site = 0;
    std::uint64_t issued = 0;
    bool stopped = false;
  };
  struct Request {
    std::int64_t client = -1;  // -1 = open-loop
    std::uint16_t site = 0;
    Time issued = 0;
    std::map<PartitionId, std::vector<Key>> accesses;
    OpKind op = OpKind::Put;
  };
  struct Pending {
    std::size_t stats = 0;  // index into commands_
    std::int64_t client = -1;
    ProcessId submitter;
    std::vector<PartitionId> partitions;
    std::map<PartitionId, Time> reply_at;
    Time return_at = std::numeric_limits<Time>::max();
    bool returned = false;
  };

  struct ProcessHash {
    std::size_t operator()(const ProcessId& p) const noexcept { return std::hash<ProcessId>{}(p); }
  };

  void schedule(Time t, Event ev);
  void trace(TraceEvent ev);
  Process& process(const ProcessId& p);
  bool crashed(const ProcessId& p) const;
  Time crash_time(const ProcessId& p) const;
  std::optional<ProcessId> choose_submitter(std::uint16_t site, PartitionId p) const;
  Time delay(const ProcessId& from, const ProcessId& to);
  bool dropped(const ProcessId& from, const ProcessId& to, MsgType type) const;

  void setup();
  void issue_client(std::uint64_t client);
  void start_request(std::uint64_t request);
  void submit_request(const ProcessId& submitter, std::uint64_t request);
  void crash(const ProcessId& target, bool whole_site);
  void complete(const CommandId& id);

  const Scenario& sc_;
  Time now_ = 0;
  Time horizon_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Queued, std::vector<Queued>, std::greater<>> queue_;
  std::vector<Event> slots_;
  std::vector<std::uint32_t> free_slots_;

  std::mt19937_64 net_rng_;
  std::mt19937_64 work_rng_;
  std::mt19937_64 fault_rng_;

  std::unordered_map<ProcessId, Process, ProcessHash> procs_;
  std::unordered_map<ProcessId, Time, ProcessHash> crashed_procs_;
  std::map<std::uint16_t, Time> crashed_sites_;

  std::unique_ptr<CommandGenerator> generator_;
  std::vector<Client> clients_;
  std::vector<Request> requests_;
  std::unordered_map<CommandId, Pending> pending_;
  std::vector<CommandStats> commands_;

  RunChecker checker_;
  TraceHasher hasher_;
  std::ostream* trace_out_ = nullptr;
  std::function<void(const TraceEvent&)> observer_;
  RunResult result_;
  bool forged_ = false;
};

/// Runs `scenario` to completion.
RunResult simulate(const Scenario& scenario, std::ostream* trace_out = nullptr);

}  // namespace tsr
