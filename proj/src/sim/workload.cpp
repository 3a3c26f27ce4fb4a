#include "tsr/sim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsr {

PartitionId partition_of(Key key, PartitionMap map, std::uint32_t partitions,
                         std::uint64_t keyspace) {
  switch (map) {
    case PartitionMap::Modulo: return PartitionId{static_cast<std::uint32_t>(key % partitions)};
    case PartitionMap::Identity:
      if (key >= partitions) throw std::invalid_argument("identity partition map: key beyond partitions");
      return PartitionId{static_cast<std::uint32_t>(key)};
    case PartitionMap::Range: {
      const std::uint64_t space = std::max<std::uint64_t>(keyspace, 1);
      const auto k = std::min(key, space - 1);
      return PartitionId{static_cast<std::uint32_t>((static_cast<__uint128_t>(k) * partitions) / space)};
    }
  }
  return PartitionId{0};
}

ZipfSampler::ZipfSampler(std::uint64_t n, double s) {
  if (n == 0) throw std::invalid_argument("zipf keyspace must be positive");
  cdf_.resize(n);
  double sum = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    sum += 1.0 / std::pow(static_cast<double>(k + 1), s);
    cdf_[k] = sum;
  }
  for (auto& v : cdf_) v /= sum;
}

std::uint64_t ZipfSampler::operator()(std::mt19937_64& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::uint64_t>(it - cdf_.begin());
}

CommandGenerator::CommandGenerator(const WorkloadSpec& spec, PartitionMap map,
                                   std::uint32_t partitions, std::uint32_t total_clients)
    : spec_(spec), map_(map), partitions_(partitions) {
  switch (spec.kind) {
    case WorkloadKind::Conflict: keyspace_ = std::uint64_t{total_clients} + 1; break;
    case WorkloadKind::Zipf:
      keyspace_ = spec.keys;
      zipf_.emplace(spec.keys, spec.zipf_exponent);
      break;
    default: keyspace_ = std::max<std::uint64_t>(spec.keys, 1); break;
  }
}

std::map<PartitionId, std::vector<Key>> CommandGenerator::next(std::uint32_t client,
                                                               std::mt19937_64& rng) const {
  std::map<PartitionId, std::vector<Key>> out;
  auto add = [&](Key k) {
    auto& keys = out[partition_of(k, map_, partitions_, keyspace_)];
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  };
  if (spec_.kind == WorkloadKind::Zipf) {
    for (std::uint32_t i = 0; i < std::max<std::uint32_t>(spec_.keys_per_command, 1); ++i) {
      add((*zipf_)(rng));
    }
  } else {
    // Key 0 with probability conflict_rate, the client's own key otherwise.
    const bool hot = std::bernoulli_distribution(spec_.conflict_rate)(rng);
    add(hot ? Key{0} : Key{client} + 1);
  }
  return out;
}

OpKind CommandGenerator::next_op(std::mt19937_64& rng) const {
  if (spec_.get_ratio <= 0) return OpKind::Put;
  return std::bernoulli_distribution(spec_.get_ratio)(rng) ? OpKind::Get : OpKind::Put;
}

}  // namespace tsr
