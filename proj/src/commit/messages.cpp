#include "tsr/commit/messages.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace tsr {

namespace {

constexpr std::array<std::string_view, 14> kMsgNames = {
    "MSubmit",    "MPropose", "MPayload", "MProposeAck", "MCommit", "MConsensus",
    "MConsensusAck", "MBump", "MPromises", "MStable", "MRec", "MRecAck",
    "MRecNAck",   "MCommitRequest"};

static_assert(kMsgNames.size() == std::variant_size_v<Message>);

}  // namespace

std::string_view to_string(CommitPath path) {
  switch (path) {
    case CommitPath::Fast: return "fast";
    case CommitPath::Slow: return "slow";
    case CommitPath::Recovery: return "recovery";
    case CommitPath::Reply: return "reply";
  }
  return "?";
}

std::string_view to_string(MsgType type) { return kMsgNames.at(static_cast<std::size_t>(type)); }

MsgType parse_msg_type(std::string_view name) {
  for (std::size_t i = 0; i < kMsgNames.size(); ++i) {
    if (kMsgNames[i] == name) return static_cast<MsgType>(i);
  }
  throw std::invalid_argument("unknown message type '" + std::string(name) + "'");
}

std::optional<CommandId> command_of(const Message& m) {
  return std::visit(
      [](const auto& msg) -> std::optional<CommandId> {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, MPromises>) {
          return std::nullopt;
        } else if constexpr (requires { msg.cmd; }) {
          return msg.cmd->id;
        } else {
          return msg.id;
        }
      },
      m);
}

}  // namespace tsr
