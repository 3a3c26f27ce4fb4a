#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <gtest/gtest.h>

#include "tsr/core/config.hpp"
#include "tsr/core/interval_set.hpp"
#include "tsr/core/quorum.hpp"
#include "tsr/core/topology.hpp"
#include "tsr/core/types.hpp"

namespace tsr {
namespace {

const PartitionId kP0{0};
const PartitionId kP1{1};
ProcessId proc(std::uint16_t site, std::uint32_t partition = 0) { return {site, PartitionId{partition}}; }

TEST(NextId, FirstIdAndCounter) {
  std::uint64_t counter = 0;
  EXPECT_EQ(next_id(proc(0), counter), (CommandId{proc(0), 0}));
  EXPECT_EQ(counter, 1u);
}

TEST(NextId, SuccessiveIdsDistinctAndIncreasing) {
  std::uint64_t counter = 0;
  const auto a = next_id(proc(0), counter);
  const auto b = next_id(proc(0), counter);
  EXPECT_NE(a, b);
  EXPECT_LT(a, b);
}

TEST(NextId, SubmitterDisambiguates) {
  std::uint64_t ca = 0, cb = 0;
  EXPECT_NE(next_id(proc(0), ca), next_id(proc(1), cb));
}

TEST(IdOrder, Examples) {
  const CommandId a3{proc(0), 3}, a4{proc(0), 4}, a9{proc(0), 9}, b0{proc(1), 0};
  EXPECT_EQ(id_order(a3, a4), std::strong_ordering::less);
  EXPECT_EQ(id_order(a9, b0), std::strong_ordering::less);
  EXPECT_EQ(id_order(a3, a3), std::strong_ordering::equal);
}

TEST(IdOrder, StrictTotalOrderOnRandomTriples) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> site(0, 3), part(0, 2), seq(0, 5);
  auto draw = [&] { return CommandId{proc(site(rng), part(rng)), static_cast<std::uint64_t>(seq(rng))}; };
  for (int i = 0; i < 20000; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    const auto ab = id_order(a, b), ba = id_order(b, a);
    if (a == b) {
      EXPECT_EQ(ab, std::strong_ordering::equal);
    } else {
      EXPECT_NE(ab, std::strong_ordering::equal);
      EXPECT_EQ(ab == std::strong_ordering::less, ba == std::strong_ordering::greater);
    }
    if (id_order(a, b) == std::strong_ordering::less && id_order(b, c) == std::strong_ordering::less) {
      EXPECT_EQ(id_order(a, c), std::strong_ordering::less);
    }
  }
}

TEST(Parse, ProcessAndCommandRoundTrip) {
  for (std::uint16_t s : {0, 4, 17}) {
    for (std::uint32_t p : {0u, 2u, 300u}) {
      const ProcessId pid = proc(s, p);
      EXPECT_EQ(parse_process(to_string(pid)), pid);
      const CommandId id{pid, 12345};
      EXPECT_EQ(parse_command_id(to_string(id)), id);
    }
  }
  EXPECT_EQ(to_string(proc(3, 1)), "s3p1");
  EXPECT_EQ(to_string(CommandId{proc(0), 2}), "s0p0#2");
}

TEST(Parse, RejectsMalformed) {
  for (const char* bad : {"", "s", "p0", "s0", "s0p", "sxp0", "s0p0x", "x0p0"}) {
    EXPECT_THROW(parse_process(bad), std::invalid_argument) << bad;
  }
  for (const char* bad : {"s0p0", "s0p0#", "s0p0#a", "#1"}) {
    EXPECT_THROW(parse_command_id(bad), std::invalid_argument) << bad;
  }
}

TEST(Phase, TransitionGraph) {
  EXPECT_TRUE(phase_transition_allowed(Phase::Start, Phase::Payload));
  EXPECT_TRUE(phase_transition_allowed(Phase::Start, Phase::Propose));
  EXPECT_TRUE(phase_transition_allowed(Phase::Payload, Phase::RecoverR));
  EXPECT_TRUE(phase_transition_allowed(Phase::Propose, Phase::RecoverP));
  EXPECT_TRUE(phase_transition_allowed(Phase::RecoverR, Phase::Commit));
  EXPECT_TRUE(phase_transition_allowed(Phase::Commit, Phase::Execute));
  EXPECT_FALSE(phase_transition_allowed(Phase::Execute, Phase::Commit));
  EXPECT_FALSE(phase_transition_allowed(Phase::Commit, Phase::Propose));
  EXPECT_FALSE(phase_transition_allowed(Phase::Start, Phase::Commit));
  EXPECT_FALSE(phase_transition_allowed(Phase::Payload, Phase::Propose));
  EXPECT_TRUE(is_pending(Phase::Payload));
  EXPECT_TRUE(is_pending(Phase::RecoverP));
  EXPECT_FALSE(is_pending(Phase::Start));
  EXPECT_TRUE(is_committed(Phase::Execute));
  EXPECT_FALSE(is_committed(Phase::Propose));
}

TEST(Config, QuorumSizes) {
  Config c;
  c.r = 5;
  c.f = 2;
  EXPECT_EQ(c.fast_quorum_size(), 4u);
  EXPECT_EQ(c.slow_quorum_size(), 3u);
  EXPECT_EQ(c.recovery_quorum_size(), 3u);
  c.f = 1;
  EXPECT_EQ(c.fast_quorum_size(), 3u);
}

TEST(Config, RejectsOutOfRangeF) {
  for (std::uint32_t r = 1; r <= 9; ++r) {
    for (std::uint32_t f = 0; f <= 5; ++f) {
      Config c;
      c.r = r;
      c.f = f;
      c.recovery_timeout = millis(100);
      const bool ok = f >= 1 && f <= (r - 1) / 2;
      if (ok) {
        EXPECT_NO_THROW(c.validate()) << r << "," << f;
      } else {
        EXPECT_THROW(c.validate(), std::invalid_argument) << r << "," << f;
      }
    }
  }
}

TEST(Config, RejectsZeroPartitionsAndPeriods) {
  Config c;
  c.partitions = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.partitions = 1;
  c.promise_period = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Topology, OneWayIsHalfRtt) {
  const auto t = Topology::ec2_five_sites();
  EXPECT_EQ(t.one_way(0, 3), millis(36));  // Ireland -> Canada
  EXPECT_EQ(t.rtt(0, 1), millis(141));
  EXPECT_EQ(t.max_rtt(), millis(338));
  EXPECT_EQ(t.site_name(2), "singapore");
}

TEST(Topology, RejectsBadMatrices) {
  EXPECT_THROW(Topology({"a", "b"}, {{0, 1}, {2, 0}}), std::invalid_argument);
  EXPECT_THROW(Topology({"a", "b"}, {{1, 1}, {1, 0}}), std::invalid_argument);
  EXPECT_THROW(Topology({"a", "b"}, {{0, -1}, {-1, 0}}), std::invalid_argument);
  EXPECT_THROW(Topology({"a", "b"}, {{0, 1}}), std::invalid_argument);
}

std::vector<ProcessId> sort_row_oracle(const Topology& t, std::size_t from, PartitionId p, std::size_t n) {
  std::vector<std::size_t> sites(t.size());
  std::iota(sites.begin(), sites.end(), 0);
  std::vector<ProcessId> out;
  // Repeated selection of the minimum: independent of the library sort.
  std::vector<bool> used(t.size(), false);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = t.size();
    for (auto s : sites) {
      if (used[s]) continue;
      if (best == t.size() || t.rtt(from, s) < t.rtt(from, best)) best = s;
    }
    used[best] = true;
    out.push_back(ProcessId{static_cast<std::uint16_t>(best), p});
  }
  return out;
}

TEST(FastQuorums, IrelandRowF1) {
  const auto t = Topology::ec2_five_sites();
  Config c;
  c.r = 5;
  c.f = 1;
  const auto qs = fast_quorums(proc(0), {kP0}, t, c);
  const std::vector<ProcessId> expected{proc(0), proc(3), proc(1)};  // A, then 72 and 141
  EXPECT_EQ(qs.at(kP0), expected);
  EXPECT_EQ(qs.at(kP0), sort_row_oracle(t, 0, kP0, 3));
}

TEST(FastQuorums, ThreeReplicasMajority) {
  const auto t = Topology::uniform(3, 10);
  Config c;
  c.r = 3;
  const auto qs = fast_quorums(proc(1), {kP0}, t, c);
  EXPECT_EQ(qs.at(kP0), (std::vector<ProcessId>{proc(1), proc(0)}));  // floor(3/2)+1, ties by id
}

TEST(FastQuorums, OtherPartitionCoordinatorIsClosest) {
  const auto t = Topology::ec2_five_sites();
  Config c;
  c.r = 5;
  c.f = 1;
  c.partitions = 2;
  const auto qs = fast_quorums(proc(2), {kP0, kP1}, t, c);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs.at(kP0).front(), proc(2));
  EXPECT_EQ(qs.at(kP1).front(), proc(2, 1));  // co-located replica has rtt 0
  for (const auto& [p, q] : qs) {
    EXPECT_EQ(q, sort_row_oracle(t, q.front().site, p, 3));
  }
}

TEST(FastQuorums, SuspectedReplicasAvoided) {
  const auto t = Topology::ec2_five_sites();
  Config c;
  c.r = 5;
  c.f = 1;
  const auto qs = fast_quorums(proc(0), {kP0}, t, c, [](const ProcessId& p) { return p.site == 3; });
  EXPECT_EQ(qs.at(kP0), (std::vector<ProcessId>{proc(0), proc(1), proc(4)}));
}

TEST(FastQuorums, PropertySizeMembershipHead) {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t r = std::uniform_int_distribution<std::size_t>(3, 7)(rng);
    std::vector<std::vector<double>> rtt(r, std::vector<double>(r, 0));
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = a + 1; b < r; ++b) rtt[a][b] = rtt[b][a] = std::uniform_int_distribution<int>(1, 300)(rng);
    }
    std::vector<std::string> names;
    for (std::size_t s = 0; s < r; ++s) names.push_back("s" + std::to_string(s));
    const Topology t(names, rtt);
    Config c;
    c.r = static_cast<std::uint32_t>(r);
    c.f = std::uniform_int_distribution<std::uint32_t>(1, (c.r - 1) / 2)(rng);
    c.partitions = 3;
    const ProcessId i = proc(std::uniform_int_distribution<int>(0, static_cast<int>(r) - 1)(rng), 1);
    const auto qs = fast_quorums(i, {kP0, kP1, PartitionId{2}}, t, c);
    for (const auto& [p, q] : qs) {
      ASSERT_EQ(q.size(), c.fast_quorum_size());
      EXPECT_EQ(std::set<ProcessId>(q.begin(), q.end()).size(), q.size());
      for (const auto& m : q) EXPECT_EQ(m.partition, p);
      EXPECT_EQ(closest_replica(i.site, p, t), q.front());
    }
    EXPECT_EQ(qs.at(kP1).front(), i);
  }
}

TEST(IntervalSet, MatchesSetOracle) {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    IntervalSet set;
    std::set<Timestamp> oracle;
    for (int k = 0; k < 40; ++k) {
      // hi may fall below lo: an empty range
      const Timestamp lo = std::uniform_int_distribution<Timestamp>(3, 60)(rng);
      const Timestamp hi = lo + std::uniform_int_distribution<Timestamp>(0, 6)(rng) - 2;
      set.insert(lo, hi);
      for (Timestamp v = lo; v <= hi; ++v) oracle.insert(v);
      Timestamp prefix = 0;
      while (oracle.contains(prefix + 1)) ++prefix;
      ASSERT_EQ(set.contiguous_prefix(), prefix);
      ASSERT_EQ(set.size(), oracle.size());
    }
    for (Timestamp v = 0; v <= 70; ++v) ASSERT_EQ(set.contains(v), oracle.contains(v)) << v;
    const auto ranges = set.ranges();
    for (std::size_t k = 1; k < ranges.size(); ++k) EXPECT_GT(ranges[k].first, ranges[k - 1].second + 1);
  }
}

TEST(IntervalSet, EmptyRangeIgnored) {
  IntervalSet s;
  s.insert(5, 4);
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.contiguous_prefix(), 0u);
}

}  // namespace
}  // namespace tsr
