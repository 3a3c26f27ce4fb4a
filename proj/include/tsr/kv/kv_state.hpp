#pragma once

#include <map>
#include <string>

#include "tsr/core/types.hpp"

namespace tsr {

/// Key-value state of one partition at one process.
class KvState {
 public:
  /// Applies the accesses of `cmd` on partition `p`. PUT stores the payload
  /// under every key and returns the previous values; GET returns the current
  /// ones. Values of several keys are joined with ','; missing keys read as
  /// empty.
  std::string apply(PartitionId p, const Command& cmd);

  std::string get(Key k) const;
  const std::map<Key, std::string>& data() const { return data_; }
  std::uint64_t applied() const { return applied_; }

  friend bool operator==(const KvState&, const KvState&) = default;

 private:
  std::map<Key, std::string> data_;
  std::uint64_t applied_ = 0;
};

}  // namespace tsr
