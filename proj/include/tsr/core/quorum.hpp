#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "tsr/core/config.hpp"
#include "tsr/core/topology.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

/// Per accessed partition, the fast quorum with the coordinator at the head.
using FastQuorumMap = std::map<PartitionId, std::vector<ProcessId>>;
using QuorumsPtr = std::shared_ptr<const FastQuorumMap>;

/// Returns true when the caller believes `target` has crashed.
using SuspectFn = std::function<bool(const ProcessId& target)>;

/// Replica of `p` closest to `site`, preferring unsuspected replicas; ties
/// go to the lower ProcessId.
ProcessId closest_replica(std::size_t site, PartitionId p, const Topology& topology,
                          const SuspectFn& suspected = {});

/// Builds the fast quorum of every partition in `partitions` on behalf of
/// submitter `i`: the coordinator is the replica closest to `i`, followed by
/// the fast_quorum_size()-1 replicas closest to the coordinator. Unsuspected
/// replicas are preferred; suspected ones only fill otherwise missing slots.
/// Throws std::invalid_argument (insufficient replicas) when a partition has
/// fewer than fast_quorum_size() replicas.
FastQuorumMap fast_quorums(const ProcessId& i, const std::vector<PartitionId>& partitions,
                           const Topology& topology, const Config& config,
                           const SuspectFn& suspected = {});

/// All replicas of `p` in site order.
std::vector<ProcessId> replicas_of(PartitionId p, std::size_t r);

}  // namespace tsr
