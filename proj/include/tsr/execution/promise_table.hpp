#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "tsr/commit/promise.hpp"
#include "tsr/core/interval_set.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

/// Sorts `hcvs` ascending and returns the element at index floor(r/2): the
/// largest timestamp whose promises are known from a majority.
Timestamp stable_timestamp(std::vector<Timestamp> hcvs);

/// Promises known locally from each replica of the partition, indexed by
/// site. A promise attached to a command is admitted only once that command
/// is committed locally; until then it waits in a buffer.
class PromiseTable {
 public:
  explicit PromiseTable(std::size_t r) : known_(r), hcv_(r, 0) {}

  std::size_t size() const { return known_.size(); }

  void add_detached(std::size_t peer, Timestamp lo, Timestamp hi);
  void add_attached(std::size_t peer, const AttachedPromise& a, bool committed);
  /// Adds every promise of `batch`; `committed` tells whether an id is
  /// committed locally.
  void ingest(std::size_t peer, const PromiseBatch& batch,
              const std::function<bool(const CommandId&)>& committed);

  /// Moves the promises buffered for `id` into the table.
  void admit(const CommandId& id);
  bool has_buffered(const CommandId& id) const { return buffered_.contains(id); }
  std::size_t buffered_count() const { return buffered_.size(); }

  /// Highest contiguous promise of `peer`.
  Timestamp hcv(std::size_t peer) const { return hcv_[peer]; }
  Timestamp stable() const { return stable_timestamp(hcv_); }
  const IntervalSet& known(std::size_t peer) const { return known_[peer]; }

 private:
  void insert(std::size_t peer, Timestamp lo, Timestamp hi);

  std::vector<IntervalSet> known_;
  std::vector<Timestamp> hcv_;
  std::map<CommandId, std::vector<std::pair<std::size_t, Timestamp>>> buffered_;
};

}  // namespace tsr
