#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tsr/core/types.hpp"

namespace tsr {

/// Set of timestamps stored as disjoint, non-adjacent closed ranges.
class IntervalSet {
 public:
  /// Adds [lo, hi]. No-op when lo > hi.
  void insert(Timestamp lo, Timestamp hi);
  void insert(Timestamp v) { insert(v, v); }

  bool contains(Timestamp v) const;
  bool empty() const { return ranges_.empty(); }
  std::size_t range_count() const { return ranges_.size(); }
  std::uint64_t size() const;

  /// Largest c such that 1..c are all present; 0 when 1 is absent.
  Timestamp contiguous_prefix() const;

  std::vector<std::pair<Timestamp, Timestamp>> ranges() const;
  void clear() { ranges_.clear(); }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::map<Timestamp, Timestamp> ranges_;  // lo -> hi
};

}  // namespace tsr
