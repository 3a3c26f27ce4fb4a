#pragma once

#include <string>
#include <vector>

#include "tsr/core/types.hpp"

namespace tsr {

/// Sites and their symmetric round-trip latencies. Every partition has one
/// replica per site, so the replication factor equals the number of sites.
class Topology {
 public:
  Topology() = default;
  /// Throws std::invalid_argument unless `rtt_ms` is square, symmetric, has a
  /// zero diagonal and non-negative entries.
  Topology(std::vector<std::string> sites, std::vector<std::vector<double>> rtt_ms);

  std::size_t size() const { return sites_.size(); }
  const std::vector<std::string>& sites() const { return sites_; }
  const std::string& site_name(std::size_t site) const { return sites_.at(site); }

  double rtt_ms(std::size_t a, std::size_t b) const { return rtt_ms_[a][b]; }
  Time rtt(std::size_t a, std::size_t b) const { return rtt_us_[a][b]; }
  /// Half the round trip.
  Time one_way(std::size_t a, std::size_t b) const { return rtt_us_[a][b] / 2; }
  Time max_rtt() const;

  const std::vector<std::vector<double>>& rtt_matrix_ms() const { return rtt_ms_; }

  /// Five EC2 regions (Ireland, N. California, Singapore, Canada, Sao Paulo)
  /// with their measured ping latencies.
  static Topology ec2_five_sites();

  /// `n` sites, all pairs at the same round-trip latency.
  static Topology uniform(std::size_t n, double rtt_ms);

 private:
  std::vector<std::string> sites_;
  std::vector<std::vector<double>> rtt_ms_;
  std::vector<std::vector<Time>> rtt_us_;
};

}  // namespace tsr
