#include "tsr/sim/trace.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

namespace tsr {

namespace {

constexpr std::array<std::string_view, 13> kKindNames = {
    "header", "send",   "proposal", "submit",         "decide",   "commit", "stable",
    "exec",   "return", "crash",    "recovery_start", "recovery", "end"};

constexpr std::array<std::string_view, 7> kPhaseNames = {
    "START", "PAYLOAD", "PROPOSE", "RECOVER-R", "RECOVER-P", "COMMIT", "EXECUTE"};

Phase parse_phase(std::string_view name) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == name) return static_cast<Phase>(i);
  }
  throw std::invalid_argument("unknown phase '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(TraceKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

TraceKind parse_trace_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<TraceKind>(i);
  }
  throw std::invalid_argument("unknown trace kind '" + std::string(name) + "'");
}

void describe_message(const Message& msg, TraceEvent& ev) {
  ev.msg = type_of(msg);
  ev.id = command_of(msg);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MPropose>) {
          ev.ts = m.t;
        } else if constexpr (std::is_same_v<T, MProposeAck> || std::is_same_v<T, MBump>) {
          ev.ts = m.t;
        } else if constexpr (std::is_same_v<T, MCommit>) {
          ev.commits = m.commits;
          ev.detail = std::string(to_string(m.path));
        } else if constexpr (std::is_same_v<T, MConsensus>) {
          ev.ts = m.t;
          ev.ballot = m.b;
        } else if constexpr (std::is_same_v<T, MConsensusAck> || std::is_same_v<T, MRec> ||
                             std::is_same_v<T, MRecNAck>) {
          ev.ballot = m.b;
        } else if constexpr (std::is_same_v<T, MRecAck>) {
          ev.ts = m.t;
          ev.ballot = m.b;
          ev.ab = m.ab;
          ev.phase = m.phase;
        }
      },
      msg);
}

nlohmann::ordered_json to_json(const TraceEvent& ev) {
  nlohmann::ordered_json j;
  j["t"] = ev.t;
  j["kind"] = to_string(ev.kind);
  if (ev.src) j["src"] = to_string(*ev.src);
  if (ev.dst) j["dst"] = to_string(*ev.dst);
  if (ev.msg) j["msg"] = to_string(*ev.msg);
  if (ev.id) j["id"] = to_string(*ev.id);
  if (ev.ts != 0) j["ts"] = ev.ts;
  if (ev.partition_ts != 0) j["partition_ts"] = ev.partition_ts;
  if (ev.ballot != 0) j["ballot"] = ev.ballot;
  if (ev.ab != 0) j["ab"] = ev.ab;
  if (ev.phase) j["phase"] = to_string(*ev.phase);
  if (!ev.detail.empty()) j["detail"] = ev.detail;
  if (!ev.partitions.empty()) {
    auto& arr = j["partitions"] = nlohmann::ordered_json::array();
    for (auto p : ev.partitions) arr.push_back(p.index);
  }
  if (!ev.commits.empty()) {
    auto& arr = j["commits"] = nlohmann::ordered_json::array();
    for (const auto& [p, t] : ev.commits) arr.push_back({p.index, t});
  }
  if (!ev.members.empty()) {
    auto& arr = j["members"] = nlohmann::ordered_json::array();
    for (const auto& m : ev.members) arr.push_back(to_string(m));
  }
  if (ev.kind == TraceKind::Header) {
    j["r"] = ev.r;
    j["f"] = ev.f;
  }
  if (ev.flag) j["flag"] = true;
  return j;
}

TraceEvent trace_event_from_json(const nlohmann::json& j) {
  try {
    TraceEvent ev;
    ev.t = j.at("t").get<Time>();
    ev.kind = parse_trace_kind(j.at("kind").get<std::string>());
    if (j.contains("src")) ev.src = parse_process(j["src"].get<std::string>());
    if (j.contains("dst")) ev.dst = parse_process(j["dst"].get<std::string>());
    if (j.contains("msg")) ev.msg = parse_msg_type(j["msg"].get<std::string>());
    if (j.contains("id")) ev.id = parse_command_id(j["id"].get<std::string>());
    ev.ts = j.value("ts", Timestamp{0});
    ev.partition_ts = j.value("partition_ts", Timestamp{0});
    ev.ballot = j.value("ballot", Ballot{0});
    ev.ab = j.value("ab", Ballot{0});
    if (j.contains("phase")) ev.phase = parse_phase(j["phase"].get<std::string>());
    ev.detail = j.value("detail", std::string{});
    if (j.contains("partitions")) {
      for (const auto& p : j["partitions"]) ev.partitions.push_back(PartitionId{p.get<std::uint32_t>()});
    }
    if (j.contains("commits")) {
      for (const auto& e : j["commits"]) {
        ev.commits.emplace_back(PartitionId{e.at(0).get<std::uint32_t>()}, e.at(1).get<Timestamp>());
      }
    }
    if (j.contains("members")) {
      for (const auto& m : j["members"]) ev.members.push_back(parse_process(m.get<std::string>()));
    }
    ev.r = j.value("r", 0u);
    ev.f = j.value("f", 0u);
    ev.flag = j.value("flag", false);
    return ev;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace event: ") + e.what());
  }
}

void TraceHasher::bytes(const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= b[i];
    h_ *= 0x100000001b3ULL;
  }
}

void TraceHasher::add(const TraceEvent& ev) {
  auto process = [this](const std::optional<ProcessId>& p) {
    std::uint8_t has = p.has_value();
    pod(has);
    if (p) {
      pod(p->site);
      pod(p->partition.index);
    }
  };
  pod(ev.t);
  pod(static_cast<std::uint8_t>(ev.kind));
  process(ev.src);
  process(ev.dst);
  pod(static_cast<std::int16_t>(ev.msg ? static_cast<int>(*ev.msg) : -1));
  process(ev.id ? std::optional<ProcessId>(ev.id->submitter) : std::nullopt);
  pod(ev.id ? ev.id->seq : std::uint64_t{0});
  pod(ev.ts);
  pod(ev.partition_ts);
  pod(ev.ballot);
  pod(ev.ab);
  pod(static_cast<std::int16_t>(ev.phase ? static_cast<int>(*ev.phase) : -1));
  std::uint64_t n = ev.detail.size();
  pod(n);
  bytes(ev.detail.data(), ev.detail.size());
  n = ev.partitions.size();
  pod(n);
  for (auto p : ev.partitions) pod(p.index);
  n = ev.commits.size();
  pod(n);
  for (const auto& [p, t] : ev.commits) {
    pod(p.index);
    pod(t);
  }
  n = ev.members.size();
  pod(n);
  for (const auto& m : ev.members) {
    pod(m.site);
    pod(m.partition.index);
  }
  pod(ev.r);
  pod(ev.f);
  std::uint8_t flag = ev.flag;
  pod(flag);
}

std::string TraceHasher::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

}  // namespace tsr
