#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tsr/commit/promise.hpp"
#include "tsr/core/quorum.hpp"
#include "tsr/core/types.hpp"

namespace tsr {

/// How a per-partition timestamp came to be committed.
enum class CommitPath : std::uint8_t { Fast, Slow, Recovery, Reply };
std::string_view to_string(CommitPath path);

struct MSubmit {
  CommandPtr cmd;
  QuorumsPtr qs;
};
struct MPropose {
  CommandPtr cmd;
  QuorumsPtr qs;
  Timestamp t = 0;
};
struct MPayload {
  CommandPtr cmd;
  QuorumsPtr qs;
};
struct MProposeAck {
  CommandId id;
  Timestamp t = 0;
  PromiseBatchPtr promises;  // issued by the proposal, when piggybacking
};
struct MCommit {
  CommandId id;
  /// One entry per partition decision carried; a reply to MCommitRequest
  /// carries every accessed partition.
  std::vector<std::pair<PartitionId, Timestamp>> commits;
  CommitPath path = CommitPath::Fast;
  std::vector<std::pair<ProcessId, PromiseBatchPtr>> promises;
};
struct MConsensus {
  CommandId id;
  Timestamp t = 0;
  Ballot b = 0;
};
struct MConsensusAck {
  CommandId id;
  Ballot b = 0;
};
struct MBump {
  CommandId id;
  Timestamp t = 0;
};
struct MPromises {
  PromiseBatchPtr promises;
};
struct MStable {
  CommandId id;
  bool reply_requested = false;
};
struct MRec {
  CommandId id;
  Ballot b = 0;
};
struct MRecAck {
  CommandId id;
  Timestamp t = 0;
  Phase phase = Phase::Start;
  Ballot ab = 0;
  Ballot b = 0;
};
struct MRecNAck {
  CommandId id;
  Ballot b = 0;
};
struct MCommitRequest {
  CommandId id;
};

using Message = std::variant<MSubmit, MPropose, MPayload, MProposeAck, MCommit, MConsensus,
                             MConsensusAck, MBump, MPromises, MStable, MRec, MRecAck, MRecNAck,
                             MCommitRequest>;

/// Matches the variant index order.
enum class MsgType : std::uint8_t {
  Submit,
  Propose,
  Payload,
  ProposeAck,
  Commit,
  Consensus,
  ConsensusAck,
  Bump,
  Promises,
  Stable,
  Rec,
  RecAck,
  RecNAck,
  CommitRequest,
};

inline MsgType type_of(const Message& m) { return static_cast<MsgType>(m.index()); }
std::string_view to_string(MsgType type);
/// Throws std::invalid_argument for unknown names.
MsgType parse_msg_type(std::string_view name);

/// Command id the message refers to; absent for MPromises.
std::optional<CommandId> command_of(const Message& m);

}  // namespace tsr
