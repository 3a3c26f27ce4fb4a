#include "tsr/execution/promise_table.hpp"

#include <algorithm>

namespace tsr {

Timestamp stable_timestamp(std::vector<Timestamp> hcvs) {
  if (hcvs.empty()) return 0;
  const std::size_t k = hcvs.size() / 2;
  std::nth_element(hcvs.begin(), hcvs.begin() + static_cast<std::ptrdiff_t>(k), hcvs.end());
  return hcvs[k];
}

void PromiseTable::insert(std::size_t peer, Timestamp lo, Timestamp hi) {
  auto& set = known_.at(peer);
  set.insert(lo, hi);
  hcv_[peer] = set.contiguous_prefix();
}

void PromiseTable::add_detached(std::size_t peer, Timestamp lo, Timestamp hi) {
  insert(peer, lo, hi);
}

void PromiseTable::add_attached(std::size_t peer, const AttachedPromise& a, bool committed) {
  if (committed) {
    insert(peer, a.ts, a.ts);
  } else {
    buffered_[a.id].emplace_back(peer, a.ts);
  }
}

void PromiseTable::ingest(std::size_t peer, const PromiseBatch& batch,
                          const std::function<bool(const CommandId&)>& committed) {
  for (const auto& [lo, hi] : batch.detached) insert(peer, lo, hi);
  for (const auto& a : batch.attached) add_attached(peer, a, committed(a.id));
}

void PromiseTable::admit(const CommandId& id) {
  auto it = buffered_.find(id);
  if (it == buffered_.end()) return;
  for (const auto& [peer, ts] : it->second) insert(peer, ts, ts);
  buffered_.erase(it);
}

}  // namespace tsr
