#include "tsr/core/types.hpp"

#include <charconv>
#include <stdexcept>

namespace tsr {

std::strong_ordering id_order(const CommandId& a, const CommandId& b) { return a <=> b; }

CommandId next_id(const ProcessId& submitter, std::uint64_t& counter) {
  return CommandId{submitter, counter++};
}

std::vector<PartitionId> Command::partitions() const {
  std::vector<PartitionId> out;
  out.reserve(accesses.size());
  for (const auto& [p, keys] : accesses) out.push_back(p);
  return out;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Start: return "START";
    case Phase::Payload: return "PAYLOAD";
    case Phase::Propose: return "PROPOSE";
    case Phase::RecoverR: return "RECOVER-R";
    case Phase::RecoverP: return "RECOVER-P";
    case Phase::Commit: return "COMMIT";
    case Phase::Execute: return "EXECUTE";
  }
  return "?";
}

bool is_pending(Phase phase) {
  return phase == Phase::Payload || phase == Phase::Propose || phase == Phase::RecoverR ||
         phase == Phase::RecoverP;
}

bool is_committed(Phase phase) { return phase == Phase::Commit || phase == Phase::Execute; }

bool phase_transition_allowed(Phase from, Phase to) {
  switch (from) {
    case Phase::Start: return to == Phase::Payload || to == Phase::Propose;
    case Phase::Payload: return to == Phase::RecoverR || to == Phase::Commit;
    case Phase::Propose: return to == Phase::RecoverP || to == Phase::Commit;
    case Phase::RecoverR:
    case Phase::RecoverP: return to == Phase::Commit;
    case Phase::Commit: return to == Phase::Execute;
    case Phase::Execute: return false;
  }
  return false;
}

std::string to_string(const ProcessId& p) {
  return "s" + std::to_string(p.site) + "p" + std::to_string(p.partition.index);
}

std::string to_string(const CommandId& id) {
  return to_string(id.submitter) + "#" + std::to_string(id.seq);
}

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("malformed " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

ProcessId parse_process(std::string_view text) {
  auto p = text.find('p');
  if (text.empty() || text.front() != 's' || p == std::string_view::npos) {
    throw std::invalid_argument("malformed process id: '" + std::string(text) + "'");
  }
  ProcessId out;
  out.site = parse_number<std::uint16_t>(text.substr(1, p - 1), "process id");
  out.partition.index = parse_number<std::uint32_t>(text.substr(p + 1), "process id");
  return out;
}

CommandId parse_command_id(std::string_view text) {
  auto hash = text.find('#');
  if (hash == std::string_view::npos) {
    throw std::invalid_argument("malformed command id: '" + std::string(text) + "'");
  }
  return CommandId{parse_process(text.substr(0, hash)),
                   parse_number<std::uint64_t>(text.substr(hash + 1), "command id")};
}

}  // namespace tsr
