#pragma once

#include <vector>

#include "tsr/commit/promise.hpp"
#include "tsr/core/interval_set.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

/// The per-process logical clock of one partition together with every
/// promise it has issued. Each increase from v to w issues promises covering
/// exactly (v, w].
class PartitionClock {
 public:
  struct Proposal {
    Timestamp ts = 0;
    PromiseBatch issued;  // promises generated by this call
  };

  Timestamp value() const { return clock_; }

  /// Proposes max(m, value()+1) for `id`: detached promises for the skipped
  /// timestamps and one promise attached to `id`.
  Proposal propose(const CommandId& id, Timestamp m);

  /// Raises the clock to max(t, value()) issuing only detached promises.
  /// Returns the issued range, empty when the clock did not move.
  PromiseBatch bump(Timestamp t);

  /// Promises issued since the previous call.
  PromiseBatch take_unsent();
  bool has_unsent() const { return !unsent_.empty(); }

  /// Every promise issued so far.
  PromiseBatch all_issued() const;
  const IntervalSet& detached() const { return detached_; }
  const std::vector<AttachedPromise>& attached() const { return attached_; }

 private:
  Timestamp clock_ = 0;
  IntervalSet detached_;
  std::vector<AttachedPromise> attached_;
  PromiseBatch unsent_;
};

}  // namespace tsr
