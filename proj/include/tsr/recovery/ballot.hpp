#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "tsr/core/types.hpp"

namespace tsr {

/// Rank (1..r) of the process owning ballot `b`. Requires b >= 1.
std::uint32_t bal_leader(Ballot b, std::uint32_t r);

/// Smallest ballot owned by `rank` in the round after the one containing
/// `bal`; floor is taken toward negative infinity, so bal = 0 yields `rank`.
Ballot recover_ballot(std::uint32_t rank, Ballot bal, std::uint32_t r);

struct RecoveryAck {
  Timestamp ts = 0;
  Phase phase = Phase::Start;
  Ballot ab = 0;
};

enum class RecoveryBranch : std::uint8_t { AcceptedMax, STrue, SFalse };
std::string_view to_string(RecoveryBranch branch);

struct RecoveryChoice {
  Timestamp ts = 0;
  RecoveryBranch branch = RecoveryBranch::SFalse;
  std::vector<ProcessId> intersection;  // recovery quorum members in the fast quorum
};

/// Timestamp a recovering leader proposes from the acks of its recovery
/// quorum. With no previously accepted value the leader takes the maximum
/// over the whole quorum when the initial coordinator answered or some
/// fast-quorum member had to propose during recovery, and over the
/// fast-quorum members only otherwise.
RecoveryChoice choose_recovery_timestamp(const std::map<ProcessId, RecoveryAck>& acks,
                                         const std::vector<ProcessId>& fast_quorum);

}  // namespace tsr
