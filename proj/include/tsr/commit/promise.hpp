#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "tsr/core/types.hpp"

namespace tsr {

struct AttachedPromise {
  CommandId id;
  Timestamp ts = 0;

  friend bool operator==(const AttachedPromise&, const AttachedPromise&) = default;
};

/// Promises issued by one process. Detached promises are closed ranges.
struct PromiseBatch {
  std::vector<std::pair<Timestamp, Timestamp>> detached;
  std::vector<AttachedPromise> attached;

  bool empty() const { return detached.empty() && attached.empty(); }
  void clear() {
    detached.clear();
    attached.clear();
  }
  /// Appends [lo, hi], extending the last range when adjacent.
  void add_detached(Timestamp lo, Timestamp hi);

  friend bool operator==(const PromiseBatch&, const PromiseBatch&) = default;
};

using PromiseBatchPtr = std::shared_ptr<const PromiseBatch>;

}  // namespace tsr
