#include "tsr/commit/fast_path.hpp"

#include <algorithm>

namespace tsr {

ProposalDecision decide_proposal(const std::vector<Timestamp>& proposals, std::uint32_t f) {
  ProposalDecision d;
  if (proposals.empty()) return d;
  d.ts = *std::max_element(proposals.begin(), proposals.end());
  d.count = static_cast<std::uint32_t>(std::count(proposals.begin(), proposals.end(), d.ts));
  d.fast = d.count >= f;
  return d;
}

}  // namespace tsr
