#include "tsr/sim/scenario.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tsr {

namespace {

void check_process(const ProcessId& p, const Scenario& sc, const std::string& what) {
  if (p.site >= sc.topology.size()) throw std::invalid_argument(what + ": site out of range");
  if (p.partition.index >= sc.config.partitions) {
    throw std::invalid_argument(what + ": partition out of range");
  }
}

}  // namespace

void Scenario::finalize() {
  if (topology.size() == 0) throw std::invalid_argument("topology has no sites");
  config.r = static_cast<std::uint32_t>(topology.size());
  if (config.recovery_timeout == 0) {
    config.recovery_timeout = std::max<Time>(5 * topology.max_rtt(), millis(50));
  }
  config.validate();
  if (config.promise_period <= 0) throw std::invalid_argument("promise_period must be positive");
  if (detection_period <= 0) throw std::invalid_argument("detection_period must be positive");

  const auto& w = workload;
  if (w.conflict_rate < 0 || w.conflict_rate > 1) throw std::invalid_argument("conflict_rate outside [0, 1]");
  if (w.get_ratio < 0 || w.get_ratio > 1) throw std::invalid_argument("get_ratio outside [0, 1]");
  if (w.kind == WorkloadKind::Conflict || w.kind == WorkloadKind::Zipf) {
    if (w.clients_per_site > 0 && w.duration == 0 && w.commands_per_client == 0) {
      throw std::invalid_argument("closed-loop clients need duration_ms or commands_per_client");
    }
  }
  if (w.kind == WorkloadKind::Zipf && w.keys == 0) throw std::invalid_argument("zipf needs keys > 0");
  if (w.kind == WorkloadKind::RoundRobin) {
    if (w.interval <= 0) throw std::invalid_argument("round_robin interval must be positive");
    for (auto s : w.sites) {
      if (s >= topology.size()) throw std::invalid_argument("round_robin site out of range");
    }
  }
  for (const auto& c : w.script) {
    if (c.site >= topology.size()) throw std::invalid_argument("script site out of range");
    if (c.accesses.empty()) throw std::invalid_argument("script command without accesses");
    for (const auto& [p, keys] : c.accesses) {
      if (p.index >= config.partitions) throw std::invalid_argument("script partition out of range");
      if (keys.empty()) throw std::invalid_argument("script partition without keys");
    }
  }
  if (partition_map == PartitionMap::Identity) {
    std::uint64_t keys = 1;
    if (w.kind == WorkloadKind::Conflict) keys = std::uint64_t{w.clients_per_site} * topology.size() + 1;
    if (w.kind == WorkloadKind::Zipf) keys = w.keys;
    if (keys > config.partitions) throw std::invalid_argument("identity partition map needs one partition per key");
  }
  for (const auto& c : crashes) {
    if (c.site >= topology.size()) throw std::invalid_argument("crash site out of range");
    if (c.partition && c.partition->index >= config.partitions) {
      throw std::invalid_argument("crash partition out of range");
    }
  }
  if (random_crashes.per_partition > config.r) {
    throw std::invalid_argument("random_crashes.per_partition exceeds r");
  }
  if (random_crashes.to < random_crashes.from) throw std::invalid_argument("random_crashes window reversed");
  for (auto p : random_crashes.partitions) {
    if (p.index >= config.partitions) throw std::invalid_argument("random_crashes partition out of range");
  }
  for (const auto& d : network.drops) {
    if (d.src) check_process(*d.src, *this, "drop src");
    if (d.dst) check_process(*d.dst, *this, "drop dst");
  }
  for (const auto& c : initial_clocks) check_process(c.process, *this, "initial clock");
  if (network.jitter < 0 || network.reorder_extra < 0 || network.gst < 0) {
    throw std::invalid_argument("network delays must be non-negative");
  }
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
}

}  // namespace tsr
