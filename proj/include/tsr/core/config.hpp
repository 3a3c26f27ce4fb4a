#pragma once

#include <cstdint>

#include "tsr/core/types.hpp"

namespace tsr {

struct Config {
  std::uint32_t r = 3;           // replicas per partition
  std::uint32_t f = 1;           // tolerated crashes per partition
  std::uint32_t partitions = 1;

  bool piggyback_promises = true;
  bool mbump = true;
  Time promise_period = millis(5);
  Time recovery_timeout = 0;  // must be positive when replicas run; 0 in scenarios = derived

  std::uint32_t fast_quorum_size() const { return r / 2 + f; }
  std::uint32_t slow_quorum_size() const { return f + 1; }
  std::uint32_t recovery_quorum_size() const { return r - f; }
  std::uint32_t majority() const { return r / 2 + 1; }

  /// Throws std::invalid_argument unless 1 <= f <= floor((r-1)/2), partitions >= 1
  /// and the periods are positive.
  void validate() const;
};

}  // namespace tsr
