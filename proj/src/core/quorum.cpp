#include "tsr/core/quorum.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>

namespace tsr {

namespace {

/// Replicas of `p` sorted by (suspected, rtt to `site`, ProcessId).
std::vector<ProcessId> by_distance(std::size_t site, PartitionId p, const Topology& topology,
                                   const SuspectFn& suspected) {
  auto replicas = replicas_of(p, topology.size());
  auto key = [&](const ProcessId& q) {
    bool s = suspected && suspected(q);
    return std::make_tuple(s, topology.rtt(site, q.site), q);
  };
  std::stable_sort(replicas.begin(), replicas.end(),
                   [&](const ProcessId& a, const ProcessId& b) { return key(a) < key(b); });
  return replicas;
}

}  // namespace

std::vector<ProcessId> replicas_of(PartitionId p, std::size_t r) {
  std::vector<ProcessId> out;
  out.reserve(r);
  for (std::size_t s = 0; s < r; ++s) out.push_back(ProcessId{static_cast<std::uint16_t>(s), p});
  return out;
}

ProcessId closest_replica(std::size_t site, PartitionId p, const Topology& topology,
                          const SuspectFn& suspected) {
  return by_distance(site, p, topology, suspected).front();
}

FastQuorumMap fast_quorums(const ProcessId& i, const std::vector<PartitionId>& partitions,
                           const Topology& topology, const Config& config,
                           const SuspectFn& suspected) {
  const std::size_t size = config.fast_quorum_size();
  if (topology.size() < size) {
    throw std::invalid_argument("insufficient replicas: partition has " +
                                std::to_string(topology.size()) + " replicas, fast quorum needs " +
                                std::to_string(size));
  }
  FastQuorumMap out;
  for (PartitionId p : partitions) {
    // The submitter coordinates its own partition.
    ProcessId coordinator = p == i.partition ? i : closest_replica(i.site, p, topology, suspected);
    std::vector<ProcessId> quorum{coordinator};
    for (const ProcessId& q : by_distance(coordinator.site, p, topology, suspected)) {
      if (quorum.size() == size) break;
      if (q != coordinator) quorum.push_back(q);
    }
    out.emplace(p, std::move(quorum));
  }
  return out;
}

}  // namespace tsr
