#include "tsr/recovery/ballot.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsr {

std::uint32_t bal_leader(Ballot b, std::uint32_t r) {
  if (b == 0) throw std::invalid_argument("ballot 0 has no leader");
  return static_cast<std::uint32_t>(b - r * ((b - 1) / r));
}

Ballot recover_ballot(std::uint32_t rank, Ballot bal, std::uint32_t r) {
  // floor((bal - 1) / r) + 1 is 0 for bal = 0 and (bal - 1) / r + 1 otherwise.
  Ballot rounds = bal == 0 ? 0 : (bal - 1) / r + 1;
  return rank + r * rounds;
}

std::string_view to_string(RecoveryBranch branch) {
  switch (branch) {
    case RecoveryBranch::AcceptedMax: return "accepted-max";
    case RecoveryBranch::STrue: return "s-true";
    case RecoveryBranch::SFalse: return "s-false";
  }
  return "?";
}

RecoveryChoice choose_recovery_timestamp(const std::map<ProcessId, RecoveryAck>& acks,
                                         const std::vector<ProcessId>& fast_quorum) {
  RecoveryChoice out;
  const RecoveryAck* accepted = nullptr;
  for (const auto& [j, ack] : acks) {
    if (ack.ab != 0 && (accepted == nullptr || ack.ab > accepted->ab)) accepted = &ack;
  }
  if (accepted != nullptr) {
    out.ts = accepted->ts;
    out.branch = RecoveryBranch::AcceptedMax;
    return out;
  }
  for (const auto& [j, ack] : acks) {
    if (std::find(fast_quorum.begin(), fast_quorum.end(), j) != fast_quorum.end()) {
      out.intersection.push_back(j);
    }
  }
  bool s = !fast_quorum.empty() && acks.contains(fast_quorum.front());
  for (const auto& j : out.intersection) s = s || acks.at(j).phase == Phase::RecoverR;
  out.branch = s ? RecoveryBranch::STrue : RecoveryBranch::SFalse;
  if (s) {
    for (const auto& [j, ack] : acks) out.ts = std::max(out.ts, ack.ts);
  } else {
    for (const auto& j : out.intersection) out.ts = std::max(out.ts, acks.at(j).ts);
  }
  return out;
}

}  // namespace tsr
