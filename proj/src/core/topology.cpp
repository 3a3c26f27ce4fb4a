#include "tsr/core/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace tsr {

Topology::Topology(std::vector<std::string> sites, std::vector<std::vector<double>> rtt_ms)
    : sites_(std::move(sites)), rtt_ms_(std::move(rtt_ms)) {
  const auto n = sites_.size();
  if (n == 0) throw std::invalid_argument("topology needs at least one site");
  if (n > 0xffff) throw std::invalid_argument("too many sites");
  if (rtt_ms_.size() != n) throw std::invalid_argument("rtt matrix row count != site count");
  rtt_us_.assign(n, std::vector<Time>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    if (rtt_ms_[a].size() != n) throw std::invalid_argument("rtt matrix is not square");
    for (std::size_t b = 0; b < n; ++b) {
      double v = rtt_ms_[a][b];
      if (v < 0) throw std::invalid_argument("negative rtt");
      if (a == b && v != 0) throw std::invalid_argument("rtt diagonal must be zero");
      rtt_us_[a][b] = millis(v);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rtt_ms_[a][b] != rtt_ms_[b][a]) throw std::invalid_argument("rtt matrix is not symmetric");
    }
  }
}

Time Topology::max_rtt() const {
  Time out = 0;
  for (const auto& row : rtt_us_) out = std::max(out, *std::max_element(row.begin(), row.end()));
  return out;
}

Topology Topology::ec2_five_sites() {
  //              IE    NC    SG    CA    SP
  return Topology({"ireland", "n-california", "singapore", "canada", "sao-paulo"},
                  {{0, 141, 186, 72, 183},
                   {141, 0, 181, 78, 190},
                   {186, 181, 0, 221, 338},
                   {72, 78, 221, 0, 123},
                   {183, 190, 338, 123, 0}});
}

Topology Topology::uniform(std::size_t n, double rtt_ms) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rtt(n, std::vector<double>(n, rtt_ms));
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("site" + std::to_string(i));
    rtt[i][i] = 0;
  }
  return Topology(std::move(names), std::move(rtt));
}

}  // namespace tsr
