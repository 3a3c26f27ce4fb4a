#include "tsr/core/interval_set.hpp"

#include <iterator>

namespace tsr {

void IntervalSet::insert(Timestamp lo, Timestamp hi) {
  if (lo > hi) return;
  // Merge with a range that starts at or before lo and reaches lo-1.
  auto it = ranges_.upper_bound(lo);
  if (it != ranges_.begin()) {
    auto prev = std::prev(it);
    if (prev->second + 1 >= lo) {
      if (prev->second >= hi) return;
      lo = prev->first;
      it = prev;
    }
  }
  // Absorb every following range that overlaps or touches [lo, hi].
  while (it != ranges_.end() && (hi == UINT64_MAX || it->first <= hi + 1)) {
    if (it->second > hi) hi = it->second;
    it = ranges_.erase(it);
  }
  ranges_[lo] = hi;
}

bool IntervalSet::contains(Timestamp v) const {
  auto it = ranges_.upper_bound(v);
  if (it == ranges_.begin()) return false;
  return std::prev(it)->second >= v;
}

std::uint64_t IntervalSet::size() const {
  std::uint64_t n = 0;
  for (const auto& [lo, hi] : ranges_) n += hi - lo + 1;
  return n;
}

Timestamp IntervalSet::contiguous_prefix() const {
  if (ranges_.empty()) return 0;
  const auto& [lo, hi] = *ranges_.begin();
  return lo <= 1 && hi >= 1 ? hi : 0;
}

std::vector<std::pair<Timestamp, Timestamp>> IntervalSet::ranges() const {
  return {ranges_.begin(), ranges_.end()};
}

}  // namespace tsr
