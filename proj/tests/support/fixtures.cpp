#include "support/fixtures.hpp"

#include <algorithm>
#include <memory>

#include "support/fake_env.hpp"
#include "tsr/commit/clock.hpp"
#include "tsr/execution/promise_table.hpp"
#include "tsr/kvcli/scenario_io.hpp"

namespace tsr::testing {

const std::vector<FastPathRow>& fast_path_rows() {
  static const std::vector<FastPathRow> rows = {
      {'a', 2, 6, {6, 10, 10}},
      {'b', 2, 6, {6, 10, 5}},
      {'c', 1, 6, {6, 10}},
      {'d', 1, 6, {5, 1}},
  };
  return rows;
}

FastPathOutcome evaluate_row(const FastPathRow& row) {
  const CommandId id{ProcessId{0, {}}, 0};
  FastPathOutcome out;
  out.proposals.push_back(row.a);
  for (Timestamp clock : row.member_clocks) {
    PartitionClock c;
    c.bump(clock);
    out.proposals.push_back(c.propose(id, row.a).ts);
  }
  out.decision = decide_proposal(out.proposals, row.f);
  out.match = std::all_of(out.proposals.begin(), out.proposals.end(),
                          [&](Timestamp t) { return t == out.proposals.front(); });
  return out;
}

std::vector<Timestamp> stability_combinations() {
  using Set = std::vector<std::pair<std::size_t, Timestamp>>;  // (process, timestamp)
  const Set green = {{0, 1}, {2, 3}};
  const Set red = {{1, 1}, {1, 2}, {1, 3}};
  const Set blue = {{0, 2}, {2, 1}, {2, 2}};
  auto stable_of = [](std::initializer_list<const Set*> sets) {
    PromiseTable table(3);
    for (const Set* s : sets) {
      for (auto [p, t] : *s) table.add_detached(p, t, t);
    }
    return table.stable();
  };
  return {stable_of({&green}),         stable_of({&red}),        stable_of({&blue}),
          stable_of({&green, &red}),   stable_of({&green, &blue}), stable_of({&red, &blue}),
          stable_of({&green, &red, &blue})};
}

ComparisonOutcome run_comparison_example() {
  const PartitionId p0{0};
  const ProcessId a{0, p0}, b{1, p0}, c{2, p0};
  Config config;
  config.r = 3;
  config.f = 1;
  config.recovery_timeout = millis(1000);
  const Topology topology = Topology::uniform(3, 10);
  FakeEnv env;
  Replica replica(b, config, topology, env);

  ComparisonOutcome out;
  out.w = CommandId{a, 0};
  out.x = CommandId{a, 1};
  out.y = CommandId{b, 0};
  out.z = CommandId{c, 0};

  auto make = [&](const CommandId& id, Key key) {
    auto cmd = std::make_shared<Command>();
    cmd->id = id;
    cmd->accesses[p0] = {key};
    return CommandPtr(cmd);
  };
  auto quorum = [&](ProcessId head) {
    std::vector<ProcessId> q{head};
    for (const auto& p : {a, b, c}) {
      if (p != head) q.push_back(p);
    }
    return std::make_shared<const FastQuorumMap>(FastQuorumMap{{p0, q}});
  };
  auto promise = [](const CommandId& id, Timestamp t) {
    PromiseBatch batch;
    batch.attached.push_back({id, t});
    return std::make_shared<const PromiseBatch>(batch);
  };

  // Arrival order at B: y then w; z only as payload.
  replica.deliver(c, MPropose{make(out.y, 1), quorum(c), 1});
  replica.deliver(a, MPropose{make(out.w, 2), quorum(a), 1});
  replica.deliver(c, MPayload{make(out.z, 3), quorum(c)});

  replica.deliver(a, MCommit{out.w, {{p0, 2}}, CommitPath::Fast, {{a, promise(out.w, 1)}}});
  replica.deliver(c, MCommit{out.y, {{p0, 2}}, CommitPath::Fast, {{c, promise(out.y, 2)}}});
  replica.deliver(c, MCommit{out.z, {{p0, 3}}, CommitPath::Fast,
                             {{c, promise(out.z, 1)}, {a, promise(out.z, 3)}}});

  out.stable = replica.stable();
  for (const auto& e : env.executed) out.executed.push_back(e.id);
  return out;
}

Scenario bundled_scenario(const std::string& stem) {
  return load_scenario(std::string(TSR_SCENARIO_DIR) + "/" + stem + ".json");
}

TracedRun run_traced(const Scenario& sc) {
  TracedRun out;
  Simulator sim(sc);
  sim.set_observer([&](const TraceEvent& ev) { out.events.push_back(ev); });
  out.result = sim.run();
  return out;
}

MultiPartitionOutcome run_multi_partition(bool mbump) {
  Scenario sc = bundled_scenario("multi_partition_mbump");
  sc.config.mbump = mbump;
  const auto run = run_traced(sc);
  MultiPartitionOutcome out;
  out.passed = run.result.passed();
  const ProcessId watched{0, PartitionId{0}};
  Timestamp final_ts = 0;
  for (const auto& ev : run.events) {
    if (ev.kind == TraceKind::Commit) {
      out.final_ts.push_back(ev.ts);
      final_ts = std::max(final_ts, ev.ts);
      if (ev.src == watched) out.p0_ts = ev.partition_ts;
      if (ev.src == ProcessId{0, PartitionId{1}}) out.p1_ts = ev.partition_ts;
    }
  }
  for (const auto& ev : run.events) {
    if (ev.kind == TraceKind::Stable && ev.src == watched && final_ts > 0 && ev.ts >= final_ts) {
      out.stable_at = ev.t;
      break;
    }
  }
  return out;
}

}  // namespace tsr::testing
