#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "tsr/sim/scenario.hpp"

namespace tsr {

/// Maps a key to its partition.
PartitionId partition_of(Key key, PartitionMap map, std::uint32_t partitions, std::uint64_t keyspace);

/// Draws zipf-distributed ranks in [0, n) with P(k) proportional to 1/(k+1)^s.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s);
  std::uint64_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<double> cdf_;
};

/// Generates client commands.
class CommandGenerator {
 public:
  CommandGenerator(const WorkloadSpec& spec, PartitionMap map, std::uint32_t partitions,
                   std::uint32_t total_clients);

  /// Keys accessed by the next command of `client`, grouped by partition.
  std::map<PartitionId, std::vector<Key>> next(std::uint32_t client, std::mt19937_64& rng) const;
  OpKind next_op(std::mt19937_64& rng) const;

  /// Size of the keyspace the partition map spreads over.
  std::uint64_t keyspace() const { return keyspace_; }

 private:
  const WorkloadSpec& spec_;
  PartitionMap map_;
  std::uint32_t partitions_;
  std::uint64_t keyspace_;
  std::optional<ZipfSampler> zipf_;
};

}  // namespace tsr
