#include "tsr/commit/clock.hpp"

#include <algorithm>

namespace tsr {

void PromiseBatch::add_detached(Timestamp lo, Timestamp hi) {
  if (lo > hi) return;
  if (!detached.empty() && detached.back().second + 1 == lo) {
    detached.back().second = hi;
  } else {
    detached.emplace_back(lo, hi);
  }
}

PartitionClock::Proposal PartitionClock::propose(const CommandId& id, Timestamp m) {
  Proposal out;
  out.ts = std::max(m, clock_ + 1);
  if (out.ts - 1 >= clock_ + 1) {
    out.issued.add_detached(clock_ + 1, out.ts - 1);
    detached_.insert(clock_ + 1, out.ts - 1);
    unsent_.add_detached(clock_ + 1, out.ts - 1);
  }
  AttachedPromise a{id, out.ts};
  out.issued.attached.push_back(a);
  attached_.push_back(a);
  unsent_.attached.push_back(a);
  clock_ = out.ts;
  return out;
}

PromiseBatch PartitionClock::bump(Timestamp t) {
  PromiseBatch out;
  if (t <= clock_) return out;
  out.add_detached(clock_ + 1, t);
  detached_.insert(clock_ + 1, t);
  unsent_.add_detached(clock_ + 1, t);
  clock_ = t;
  return out;
}

PromiseBatch PartitionClock::take_unsent() {
  PromiseBatch out = std::move(unsent_);
  unsent_.clear();
  return out;
}

PromiseBatch PartitionClock::all_issued() const {
  PromiseBatch out;
  out.detached = detached_.ranges();
  out.attached = attached_;
  return out;
}

}  // namespace tsr
