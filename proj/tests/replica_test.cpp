#include <memory>

#include <gtest/gtest.h>

#include "support/fake_env.hpp"
#include "tsr/commit/replica.hpp"

namespace tsr {
namespace {

using testing::FakeEnv;

const PartitionId kP0{0};
const PartitionId kP1{1};
ProcessId proc(std::uint16_t site, std::uint32_t partition = 0) { return {site, PartitionId{partition}}; }

class ReplicaTest : public ::testing::Test {
 protected:
  void make(std::uint32_t r, std::uint32_t f, std::uint16_t site, std::uint32_t partitions = 1,
            std::uint32_t partition = 0) {
    config_.r = r;
    config_.f = f;
    config_.partitions = partitions;
    config_.recovery_timeout = millis(500);
    topology_ = Topology::uniform(r, 20);
    replica_ = std::make_unique<Replica>(proc(site, partition), config_, topology_, env_);
  }

  CommandPtr command(const CommandId& id, std::initializer_list<std::uint32_t> partitions) {
    auto cmd = std::make_shared<Command>();
    cmd->id = id;
    for (auto p : partitions) cmd->accesses[PartitionId{p}] = {p};
    return cmd;
  }

  QuorumsPtr quorums(const CommandPtr& cmd, const ProcessId& submitter) {
    return std::make_shared<const FastQuorumMap>(
        fast_quorums(submitter, cmd->partitions(), topology_, config_));
  }

  const CommandRecord& rec(const CommandId& id) {
    const auto* r = replica_->record(id);
    EXPECT_NE(r, nullptr);
    return *r;
  }

  Config config_;
  Topology topology_;
  FakeEnv env_;
  std::unique_ptr<Replica> replica_;
};

TEST_F(ReplicaTest, SinglePartitionSubmitGoesToSelf) {
  make(3, 1, 0);
  replica_->submit({{kP0, {1}}}, OpKind::Put, "v");
  ASSERT_FALSE(env_.local.empty());
  EXPECT_TRUE(std::holds_alternative<MSubmit>(env_.local.front().second));
  EXPECT_TRUE(env_.sent_of<MSubmit>().empty());
  // fast quorum of two: one propose, one payload-only replica
  EXPECT_EQ(env_.sent_of<MPayload>().size(), 1u);
  EXPECT_EQ(env_.sent_of<MPropose>().size(), 1u);
}

TEST_F(ReplicaTest, CoordinatorProposesClockPlusOne) {
  make(5, 1, 0);
  replica_->seed_clock(5);
  replica_->submit({{kP0, {1}}}, OpKind::Put, "v");
  const auto proposes = env_.sent_of<MPropose>();
  ASSERT_EQ(proposes.size(), 2u);
  for (const auto& [to, m] : proposes) EXPECT_EQ(m.t, 6u);
  EXPECT_EQ(env_.sent_of<MPayload>().size(), 2u);  // the two non-quorum replicas
}

TEST_F(ReplicaTest, FirstProposalIsOne) {
  make(3, 1, 0);
  replica_->submit({{kP0, {1}}}, OpKind::Put, "v");
  EXPECT_EQ(env_.sent_of<MPropose>().front().second.t, 1u);
}

TEST_F(ReplicaTest, TwoPartitionSubmitReachesTwoCoordinators) {
  make(3, 1, 0, 2);
  replica_->submit({{kP0, {1}}, {kP1, {2}}}, OpKind::Put, "v");
  const auto remote = env_.sent_of<MSubmit>();
  ASSERT_EQ(remote.size(), 1u);
  EXPECT_EQ(remote.front().first, proc(0, 1));
  std::size_t local_submits = 0;
  for (const auto& [at, m] : env_.local) local_submits += std::holds_alternative<MSubmit>(m);
  EXPECT_EQ(local_submits, 1u);
}

TEST_F(ReplicaTest, SubmitOutsidePartitionRejected) {
  make(3, 1, 0, 2);
  EXPECT_THROW(replica_->submit({{kP1, {2}}}, OpKind::Put, "v"), std::invalid_argument);
}

TEST_F(ReplicaTest, PayloadIsIdempotent) {
  make(5, 1, 4);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  EXPECT_EQ(rec(cmd->id).phase, Phase::Payload);
  EXPECT_EQ(rec(cmd->id).cmd, cmd);
  const auto again = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{again, quorums(cmd, proc(0))});
  EXPECT_EQ(rec(cmd->id).cmd, cmd);
  EXPECT_EQ(rec(cmd->id).phase, Phase::Payload);
}

TEST_F(ReplicaTest, PayloadAfterCommitDropped) {
  make(5, 1, 4);
  const auto cmd = command({proc(0), 0}, {0});
  const auto qs = quorums(cmd, proc(0));
  replica_->deliver(proc(0), MPayload{cmd, qs});
  replica_->deliver(proc(0), MCommit{cmd->id, {{kP0, 3}}, CommitPath::Fast, {}});
  const auto before = rec(cmd->id).phase;
  ASSERT_TRUE(is_committed(before));
  replica_->deliver(proc(0), MPayload{cmd, qs});
  EXPECT_EQ(rec(cmd->id).phase, before);
}

TEST_F(ReplicaTest, ProposeAckCarriesProposal) {
  make(5, 1, 2);
  replica_->seed_clock(1);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPropose{cmd, quorums(cmd, proc(0)), 6});
  const auto acks = env_.sent_of<MProposeAck>();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_EQ(acks.front().first, proc(0));
  EXPECT_EQ(acks.front().second.t, 6u);
  ASSERT_TRUE(acks.front().second.promises);
  EXPECT_EQ(acks.front().second.promises->detached,
            (std::vector<std::pair<Timestamp, Timestamp>>{{2, 5}}));
  EXPECT_TRUE(env_.sent_of<MBump>().empty());
  EXPECT_EQ(rec(cmd->id).phase, Phase::Propose);
}

TEST_F(ReplicaTest, MultiPartitionProposeSendsBump) {
  make(3, 1, 1, 2);
  const auto cmd = command({proc(0), 0}, {0, 1});
  replica_->deliver(proc(0), MPropose{cmd, quorums(cmd, proc(0)), 4});
  const auto bumps = env_.sent_of<MBump>();
  ASSERT_EQ(bumps.size(), 1u);
  EXPECT_EQ(bumps.front().first, proc(1, 1));
  EXPECT_EQ(bumps.front().second.t, 4u);
}

TEST_F(ReplicaTest, BumpRaisesClockOnlyWhileProposing) {
  make(3, 1, 1, 2);
  replica_->seed_clock(6);
  const auto cmd = command({proc(0, 1), 0}, {0, 1});
  replica_->deliver(proc(0), MPropose{cmd, quorums(cmd, proc(0, 1)), 1});
  EXPECT_EQ(replica_->clock(), 7u);
  replica_->deliver(proc(1, 1), MBump{cmd->id, 10});
  EXPECT_EQ(replica_->clock(), 10u);
  replica_->deliver(proc(1, 1), MBump{cmd->id, 3});
  EXPECT_EQ(replica_->clock(), 10u);

  const auto other = command({proc(2, 1), 0}, {0, 1});
  replica_->deliver(proc(2), MPayload{other, quorums(other, proc(2, 1))});
  replica_->deliver(proc(1, 1), MBump{other->id, 20});
  EXPECT_EQ(replica_->clock(), 10u);
}

TEST_F(ReplicaTest, ConsensusAcceptedThenNackedForLowerBallot) {
  make(5, 2, 3);
  const CommandId id{proc(0), 0};
  replica_->deliver(proc(1), MConsensus{id, 11, 2});
  EXPECT_EQ(rec(id).abal, 2u);
  EXPECT_EQ(rec(id).ts, 11u);
  EXPECT_EQ(replica_->clock(), 11u);
  replica_->deliver(proc(1), MConsensus{id, 11, 2});
  EXPECT_EQ(env_.sent_of<MConsensusAck>().size(), 2u);

  replica_->deliver(proc(1), MRec{id, 7});  // START: parked
  const CommandId id2{proc(0), 1};
  replica_->deliver(proc(1), MConsensus{id2, 4, 7});
  replica_->deliver(proc(1), MConsensus{id2, 4, 2});
  const auto nacks = env_.sent_of<MRecNAck>();
  ASSERT_EQ(nacks.size(), 1u);
  EXPECT_EQ(nacks.front().second.b, 7u);
}

TEST_F(ReplicaTest, SlowPathNeedsFPlusOneAcks) {
  make(5, 2, 0);
  replica_->submit({{kP0, {1}}}, OpKind::Put, "v");
  const CommandId id{proc(0), 0};
  // Quorum of 4; disagreeing proposals force the slow path.
  const auto& quorum = rec(id).quorums->at(kP0);
  ASSERT_EQ(quorum.size(), 4u);
  replica_->deliver(quorum[1], MProposeAck{id, 7, nullptr});
  replica_->deliver(quorum[2], MProposeAck{id, 11, nullptr});
  replica_->deliver(quorum[3], MProposeAck{id, 6, nullptr});
  ASSERT_EQ(env_.sent_of<MConsensus>().size(), 4u);
  EXPECT_EQ(env_.sent_of<MConsensus>().front().second.t, 11u);
  EXPECT_EQ(env_.sent_of<MConsensus>().front().second.b, 1u);
  // self ack arrived through the local queue; one more is not enough
  replica_->deliver(quorum[1], MConsensusAck{id, 1});
  EXPECT_TRUE(env_.sent_of<MCommit>().empty());
  replica_->deliver(quorum[1], MConsensusAck{id, 1});  // duplicate sender
  EXPECT_TRUE(env_.sent_of<MCommit>().empty());
  replica_->deliver(quorum[2], MConsensusAck{id, 5});  // other ballot
  EXPECT_TRUE(env_.sent_of<MCommit>().empty());
  replica_->deliver(quorum[2], MConsensusAck{id, 1});
  const auto commits = env_.sent_of<MCommit>();
  ASSERT_FALSE(commits.empty());
  EXPECT_EQ(commits.front().second.commits, (std::vector<std::pair<PartitionId, Timestamp>>{{kP0, 11}}));
  EXPECT_EQ(commits.front().second.path, CommitPath::Slow);
}

TEST_F(ReplicaTest, FastPathWithF1) {
  make(5, 1, 0);
  replica_->seed_clock(5);
  replica_->submit({{kP0, {1}}}, OpKind::Put, "v");
  const CommandId id{proc(0), 0};
  const auto& quorum = rec(id).quorums->at(kP0);
  replica_->deliver(quorum[1], MProposeAck{id, 7, nullptr});
  replica_->deliver(quorum[2], MProposeAck{id, 11, nullptr});
  const auto commits = env_.sent_of<MCommit>();
  ASSERT_EQ(commits.size(), 4u);  // every other replica
  EXPECT_EQ(commits.front().second.path, CommitPath::Fast);
  EXPECT_EQ(commits.front().second.commits.front().second, 11u);
  EXPECT_TRUE(env_.sent_of<MConsensus>().empty());
  EXPECT_TRUE(is_committed(rec(id).phase));
}

TEST_F(ReplicaTest, MultiPartitionCommitTakesMaximum) {
  make(3, 1, 1, 2);
  const auto cmd = command({proc(0), 0}, {0, 1});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  replica_->deliver(proc(0), MCommit{cmd->id, {{kP0, 6}}, CommitPath::Fast, {}});
  EXPECT_FALSE(is_committed(rec(cmd->id).phase));
  replica_->deliver(proc(0, 1), MCommit{cmd->id, {{kP1, 10}}, CommitPath::Fast, {}});
  EXPECT_TRUE(is_committed(rec(cmd->id).phase));
  EXPECT_EQ(rec(cmd->id).final_ts, 10u);
  EXPECT_GE(replica_->clock(), 10u);
}

TEST_F(ReplicaTest, EqualCommitsKeepValue) {
  make(3, 1, 1, 2);
  const auto cmd = command({proc(0), 0}, {0, 1});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  replica_->deliver(proc(0), MCommit{cmd->id, {{kP0, 7}, {kP1, 7}}, CommitPath::Reply, {}});
  EXPECT_EQ(rec(cmd->id).final_ts, 7u);
  EXPECT_GE(replica_->clock(), 7u);
}

TEST_F(ReplicaTest, RecFromPayloadProposesFresh) {
  make(5, 1, 4);
  replica_->seed_clock(4);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  replica_->deliver(proc(1), MRec{cmd->id, 2});
  const auto acks = env_.sent_of<MRecAck>();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_EQ(acks.front().second.t, 5u);
  EXPECT_EQ(acks.front().second.phase, Phase::RecoverR);
  EXPECT_EQ(acks.front().second.ab, 0u);
  EXPECT_EQ(acks.front().second.b, 2u);
}

TEST_F(ReplicaTest, RecFromProposeReportsProposal) {
  make(5, 1, 2);
  replica_->seed_clock(10);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPropose{cmd, quorums(cmd, proc(0)), 6});
  replica_->deliver(proc(1), MRec{cmd->id, 2});
  const auto acks = env_.sent_of<MRecAck>();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_EQ(acks.front().second.t, 11u);
  EXPECT_EQ(acks.front().second.phase, Phase::RecoverP);
}

TEST_F(ReplicaTest, RecBelowBallotNacked) {
  make(5, 1, 2);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  replica_->deliver(proc(3), MRec{cmd->id, 9});
  replica_->deliver(proc(1), MRec{cmd->id, 7});
  const auto nacks = env_.sent_of<MRecNAck>();
  ASSERT_EQ(nacks.size(), 1u);
  EXPECT_EQ(nacks.front().first, proc(1));
  EXPECT_EQ(nacks.front().second.b, 9u);
}

TEST_F(ReplicaTest, CommittedIgnoresRec) {
  make(5, 1, 2);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  replica_->deliver(proc(0), MCommit{cmd->id, {{kP0, 3}}, CommitPath::Fast, {}});
  replica_->deliver(proc(1), MRec{cmd->id, 2});
  EXPECT_TRUE(env_.sent_of<MRecAck>().empty());
  EXPECT_TRUE(env_.sent_of<MRecNAck>().empty());
}

TEST_F(ReplicaTest, CommitRequestAnsweredOnlyWhenCommitted) {
  make(5, 1, 2);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  replica_->deliver(proc(4), MCommitRequest{cmd->id});
  EXPECT_TRUE(env_.sent_of<MCommit>().empty());
  replica_->deliver(proc(0), MCommit{cmd->id, {{kP0, 3}}, CommitPath::Fast, {}});
  env_.sent.clear();
  replica_->deliver(proc(4), MCommitRequest{cmd->id});
  ASSERT_EQ(env_.sent.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<MPayload>(env_.sent[0].msg));
  EXPECT_TRUE(std::holds_alternative<MCommit>(env_.sent[1].msg));
  EXPECT_EQ(env_.sent[1].to, proc(4));
}

TEST_F(ReplicaTest, RecoveryAtLeaderAfterTimeout) {
  make(5, 1, 1);
  env_.suspected.insert(proc(0));
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  EXPECT_TRUE(env_.sent_of<MRec>().empty());
  env_.now_ = config_.recovery_timeout;
  replica_->tick();
  const auto recs = env_.sent_of<MRec>();
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs.front().second.b, 2u);  // rank 2, bal 0
}

TEST_F(ReplicaTest, NonLeaderOnlyResendsPayload) {
  make(5, 1, 2);
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  env_.now_ = config_.recovery_timeout;
  replica_->tick();
  EXPECT_TRUE(env_.sent_of<MRec>().empty());
  EXPECT_FALSE(env_.sent_of<MPayload>().empty());
}

TEST_F(ReplicaTest, NackMovesLeaderPastBallot) {
  make(5, 1, 1);
  env_.suspected.insert(proc(0));
  const auto cmd = command({proc(0), 0}, {0});
  replica_->deliver(proc(0), MPayload{cmd, quorums(cmd, proc(0))});
  env_.now_ = config_.recovery_timeout;
  replica_->tick();
  env_.sent.clear();
  replica_->deliver(proc(3), MRecNAck{cmd->id, 9});
  const auto recs = env_.sent_of<MRec>();
  ASSERT_FALSE(recs.empty());
  EXPECT_EQ(recs.front().second.b, 12u);
  env_.sent.clear();
  replica_->deliver(proc(3), MRecNAck{cmd->id, 9});  // stale
  EXPECT_TRUE(env_.sent_of<MRec>().empty());
}

TEST_F(ReplicaTest, ExecutesInTimestampThenIdOrder) {
  make(3, 1, 0);
  const auto a = command({proc(1), 0}, {0});
  const auto b = command({proc(2), 0}, {0});
  for (const auto& c : {b, a}) {
    replica_->deliver(c->id.submitter, MPayload{c, quorums(c, c->id.submitter)});
    replica_->deliver(c->id.submitter, MCommit{c->id, {{kP0, 2}}, CommitPath::Fast, {}});
  }
  EXPECT_TRUE(env_.executed.empty());
  PromiseBatch all;
  all.add_detached(1, 2);
  const auto batch = std::make_shared<const PromiseBatch>(all);
  replica_->deliver(proc(1), MPromises{batch});
  ASSERT_EQ(env_.executed.size(), 2u);
  EXPECT_EQ(env_.executed[0].id, a->id);
  EXPECT_EQ(env_.executed[1].id, b->id);
  EXPECT_EQ(rec(a->id).phase, Phase::Execute);
}

TEST_F(ReplicaTest, RejectsNonPositiveRecoveryTimeout) {
  Config c;
  c.r = 3;
  const auto t = Topology::uniform(3, 10);
  EXPECT_THROW(Replica(proc(0), c, t, env_), std::invalid_argument);
}

}  // namespace
}  // namespace tsr
