#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "tsr/execution/promise_table.hpp"

namespace tsr {
namespace {

const CommandId kId{ProcessId{0, {}}, 0};

Timestamp stable_oracle(const std::vector<std::set<Timestamp>>& promises) {
  // Largest s such that a majority promised every value in 1..s.
  const std::size_t r = promises.size();
  Timestamp best = 0;
  for (Timestamp s = 1; s <= 64; ++s) {
    std::size_t holders = 0;
    for (const auto& p : promises) {
      bool all = true;
      for (Timestamp v = 1; v <= s && all; ++v) all = p.contains(v);
      holders += all;
    }
    if (holders >= r / 2 + 1) best = s;
  }
  return best;
}

TEST(StableTimestamp, Examples) {
  EXPECT_EQ(stable_timestamp({0, 3, 2}), 2u);
  EXPECT_EQ(stable_timestamp({1, 0, 0}), 0u);
  EXPECT_EQ(stable_timestamp({2, 3, 3}), 3u);
  EXPECT_EQ(stable_timestamp({5, 1, 9, 4, 7}), 5u);
}

TEST(StableTimestamp, StabilityFigureRows) {
  EXPECT_EQ(testing::stability_combinations(), (std::vector<Timestamp>{0, 0, 0, 1, 2, 2, 3}));
}

TEST(StableTimestamp, MatchesMajorityOracle) {
  std::mt19937 rng(17);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t r = (rng() % 2 == 0) ? 3 : 5;
    std::vector<std::set<Timestamp>> promises(r);
    PromiseTable table(r);
    for (std::size_t j = 0; j < r; ++j) {
      const int n = std::uniform_int_distribution<int>(0, 12)(rng);
      for (int k = 0; k < n; ++k) {
        const Timestamp v = std::uniform_int_distribution<Timestamp>(1, 10)(rng);
        promises[j].insert(v);
        table.add_detached(j, v, v);
      }
    }
    ASSERT_EQ(table.stable(), stable_oracle(promises));
  }
}

TEST(PromiseTable, HighestContiguous) {
  PromiseTable t(3);
  t.add_detached(0, 2, 2);
  t.add_detached(1, 1, 3);
  t.add_detached(2, 1, 2);
  EXPECT_EQ(t.hcv(0), 0u);
  EXPECT_EQ(t.hcv(1), 3u);
  EXPECT_EQ(t.hcv(2), 2u);
}

TEST(PromiseTable, AttachedBufferedUntilCommit) {
  PromiseTable t(3);
  t.add_attached(1, {kId, 1}, false);
  EXPECT_EQ(t.hcv(1), 0u);
  EXPECT_TRUE(t.has_buffered(kId));
  t.admit(kId);
  EXPECT_EQ(t.hcv(1), 1u);
  EXPECT_FALSE(t.has_buffered(kId));
}

TEST(PromiseTable, IngestUsesCommittedPredicate) {
  PromiseTable t(3);
  PromiseBatch b;
  b.add_detached(1, 1);
  b.attached.push_back({kId, 2});
  t.ingest(2, b, [](const CommandId&) { return false; });
  EXPECT_EQ(t.hcv(2), 1u);
  EXPECT_EQ(t.buffered_count(), 1u);
  t.ingest(2, b, [](const CommandId&) { return true; });
  EXPECT_EQ(t.hcv(2), 2u);
}

TEST(ComparisonExample, ExecutesTwoAtStableTimestamp) {
  const auto out = testing::run_comparison_example();
  EXPECT_EQ(out.stable, 2u);
  EXPECT_EQ(out.executed, (std::vector<CommandId>{out.w, out.y}));
}

}  // namespace
}  // namespace tsr
