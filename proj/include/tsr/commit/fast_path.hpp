#pragma once

#include <cstdint>
#include <vector>

#include "tsr/core/types.hpp"

namespace tsr {

struct ProposalDecision {
  Timestamp ts = 0;           // highest proposal
  std::uint32_t count = 0;    // proposals equal to ts, coordinator included
  bool fast = false;          // count >= f
};

/// Decision taken once every fast-quorum member has answered.
ProposalDecision decide_proposal(const std::vector<Timestamp>& proposals, std::uint32_t f);

}  // namespace tsr
