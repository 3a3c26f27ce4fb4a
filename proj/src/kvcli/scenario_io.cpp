#include "tsr/kvcli/scenario_io.hpp"

#include <fstream>
#include <set>

namespace tsr {

namespace {

using nlohmann::json;

/// Object view that records which fields were read and rejects the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ScenarioError(path_ + ": expected an object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& key) {
    const json* v = get(key);
    if (!v) throw ScenarioError(at(key) + ": required");
    return *v;
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  T value(const std::string& key, T fallback) {
    const json* v = get(key);
    return v ? as<T>(*v, at(key)) : fallback;
  }
  Time millis_field(const std::string& key, Time fallback) {
    const json* v = get(key);
    if (!v) return fallback;
    const double d = as<double>(*v, at(key));
    if (d < 0) throw ScenarioError(at(key) + ": must be non-negative");
    return millis(d);
  }

  void done() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ScenarioError(at(k) + ": unknown field");
    }
  }

  template <typename T>
  static T as(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ScenarioError(where + ": expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ScenarioError(where + ": expected a string");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ScenarioError(where + ": expected a number");
    } else {
      if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
        throw ScenarioError(where + ": expected a non-negative integer");
      }
      if (v.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
        throw ScenarioError(where + ": out of range");
      }
    }
    return v.get<T>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const json& array_at(const json& v, const std::string& where) {
  if (!v.is_array()) throw ScenarioError(where + ": expected an array");
  return v;
}

ProcessId process_at(const json& v, const std::string& where) {
  try {
    return parse_process(Fields::as<std::string>(v, where));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(where + ": " + e.what());
  }
}

Topology parse_topology(const json& v) {
  Fields t(v, "topology");
  if (const json* preset = t.get("preset")) {
    const auto name = Fields::as<std::string>(*preset, "topology.preset");
    t.done();
    if (name != "ec2") throw ScenarioError("topology.preset: unknown preset '" + name + "'");
    return Topology::ec2_five_sites();
  }
  if (const json* u = t.get("uniform")) {
    Fields uf(*u, "topology.uniform");
    const auto sites = uf.value<std::uint32_t>("sites", 0);
    const auto rtt = Fields::as<double>(uf.need("rtt_ms"), "topology.uniform.rtt_ms");
    uf.done();
    t.done();
    if (sites == 0) throw ScenarioError("topology.uniform.sites: required and positive");
    return Topology::uniform(sites, rtt);
  }
  std::vector<std::string> names;
  for (const auto& s : array_at(t.need("sites"), "topology.sites")) {
    names.push_back(Fields::as<std::string>(s, "topology.sites[]"));
  }
  std::vector<std::vector<double>> rtt;
  for (const auto& row : array_at(t.need("rtt_ms"), "topology.rtt_ms")) {
    auto& out = rtt.emplace_back();
    for (const auto& x : array_at(row, "topology.rtt_ms[]")) out.push_back(Fields::as<double>(x, "topology.rtt_ms[][]"));
  }
  t.done();
  return Topology(std::move(names), std::move(rtt));
}

OpKind parse_op(const json& v, const std::string& where) {
  const auto s = Fields::as<std::string>(v, where);
  if (s == "put") return OpKind::Put;
  if (s == "get") return OpKind::Get;
  throw ScenarioError(where + ": expected \"put\" or \"get\"");
}

WorkloadSpec parse_workload(const json& v) {
  Fields w(v, "workload");
  WorkloadSpec spec;
  const auto kind = w.value<std::string>("kind", "conflict");
  if (kind == "conflict") {
    spec.kind = WorkloadKind::Conflict;
  } else if (kind == "zipf") {
    spec.kind = WorkloadKind::Zipf;
  } else if (kind == "round_robin") {
    spec.kind = WorkloadKind::RoundRobin;
  } else if (kind == "script") {
    spec.kind = WorkloadKind::Script;
  } else {
    throw ScenarioError("workload.kind: unknown kind '" + kind + "'");
  }
  spec.clients_per_site = w.value<std::uint32_t>("clients_per_site", 0);
  spec.conflict_rate = w.value<double>("conflict_rate", 0.0);
  spec.keys = w.value<std::uint64_t>("keys", spec.keys);
  spec.zipf_exponent = w.value<double>("zipf_exponent", spec.zipf_exponent);
  spec.keys_per_command = w.value<std::uint32_t>("keys_per_command", spec.keys_per_command);
  spec.payload_size = w.value<std::uint32_t>("payload_size", spec.payload_size);
  spec.get_ratio = w.value<double>("get_ratio", 0.0);
  spec.commands_per_client = w.value<std::uint64_t>("commands_per_client", 0);
  spec.duration = w.millis_field("duration_ms", 0);
  spec.commands = w.value<std::uint64_t>("commands", 0);
  spec.interval = w.millis_field("interval_ms", spec.interval);
  if (const json* sites = w.get("sites")) {
    for (const auto& s : array_at(*sites, "workload.sites")) {
      spec.sites.push_back(Fields::as<std::uint16_t>(s, "workload.sites[]"));
    }
  }
  if (const json* script = w.get("script")) {
    for (const auto& e : array_at(*script, "workload.script")) {
      Fields c(e, "workload.script[]");
      ScriptedCommand cmd;
      cmd.at = c.millis_field("at_ms", 0);
      cmd.site = Fields::as<std::uint16_t>(c.need("site"), "workload.script[].site");
      if (const json* op = c.get("op")) cmd.op = parse_op(*op, "workload.script[].op");
      for (const auto& a : array_at(c.need("accesses"), "workload.script[].accesses")) {
        Fields af(a, "workload.script[].accesses[]");
        const PartitionId p{Fields::as<std::uint32_t>(af.need("partition"), "accesses[].partition")};
        auto& keys = cmd.accesses[p];
        for (const auto& k : array_at(af.need("keys"), "accesses[].keys")) {
          keys.push_back(Fields::as<std::uint64_t>(k, "accesses[].keys[]"));
        }
        af.done();
      }
      c.done();
      spec.script.push_back(std::move(cmd));
    }
  }
  w.done();
  if (spec.kind == WorkloadKind::Script && spec.script.empty()) {
    throw ScenarioError("workload.script: required for kind \"script\"");
  }
  if (spec.kind == WorkloadKind::Zipf && (spec.keys_per_command < 1 || spec.keys_per_command > 2)) {
    throw ScenarioError("workload.keys_per_command: must be 1 or 2");
  }
  return spec;
}

void parse_faults(const json& v, Scenario& sc) {
  Fields f(v, "faults");
  if (const json* crashes = f.get("crashes")) {
    for (const auto& e : array_at(*crashes, "faults.crashes")) {
      Fields c(e, "faults.crashes[]");
      CrashSpec spec;
      spec.at = c.millis_field("at_ms", 0);
      spec.site = Fields::as<std::uint16_t>(c.need("site"), "faults.crashes[].site");
      if (const json* p = c.get("partition")) {
        spec.partition = PartitionId{Fields::as<std::uint32_t>(*p, "faults.crashes[].partition")};
      }
      c.done();
      sc.crashes.push_back(spec);
    }
  }
  if (const json* rc = f.get("random_crashes")) {
    Fields c(*rc, "faults.random_crashes");
    sc.random_crashes.per_partition = c.value<std::uint32_t>("per_partition", 0);
    sc.random_crashes.from = c.millis_field("from_ms", 0);
    sc.random_crashes.to = c.millis_field("to_ms", 0);
    if (const json* ps = c.get("partitions")) {
      for (const auto& p : array_at(*ps, "faults.random_crashes.partitions")) {
        sc.random_crashes.partitions.push_back(
            PartitionId{Fields::as<std::uint32_t>(p, "faults.random_crashes.partitions[]")});
      }
    }
    c.done();
  }
  if (const json* drops = f.get("drops")) {
    for (const auto& e : array_at(*drops, "faults.drops")) {
      Fields d(e, "faults.drops[]");
      DropRule rule;
      if (const json* s = d.get("src")) rule.src = process_at(*s, "faults.drops[].src");
      if (const json* s = d.get("dst")) rule.dst = process_at(*s, "faults.drops[].dst");
      if (const json* m = d.get("msg")) {
        try {
          rule.msg = parse_msg_type(Fields::as<std::string>(*m, "faults.drops[].msg"));
        } catch (const std::invalid_argument& ex) {
          throw ScenarioError(std::string("faults.drops[].msg: ") + ex.what());
        }
      }
      rule.from = d.millis_field("from_ms", 0);
      if (d.get("to_ms")) rule.to = d.millis_field("to_ms", 0);
      d.done();
      sc.network.drops.push_back(rule);
    }
  }
  if (const json* ro = f.get("reorder")) {
    Fields r(*ro, "faults.reorder");
    sc.network.reorder_extra = r.millis_field("extra_delay_max_ms", 0);
    sc.network.gst = r.millis_field("gst_ms", 0);
    r.done();
  }
  sc.network.jitter = f.millis_field("jitter_ms", 0);
  f.done();
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario sc;
  Fields top(j, "");
  sc.name = top.value<std::string>("name", sc.name);
  sc.seed = top.value<std::uint64_t>("seed", sc.seed);
  try {
    sc.topology = parse_topology(top.need("topology"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("topology: ") + e.what());
  }
  const auto declared_r = top.value<std::uint32_t>("r", 0);
  if (declared_r != 0 && declared_r != sc.topology.size()) {
    throw ScenarioError("r: " + std::to_string(declared_r) + " does not match " +
                        std::to_string(sc.topology.size()) + " topology sites");
  }
  sc.config.f = top.value<std::uint32_t>("f", 1);

  if (const json* w = top.get("workload")) sc.workload = parse_workload(*w);

  bool per_key = false;
  if (const json* p = top.get("partitions")) {
    if (p->is_string()) {
      if (p->get<std::string>() != "per_key") throw ScenarioError("partitions: expected an integer or \"per_key\"");
      per_key = true;
    } else {
      sc.config.partitions = Fields::as<std::uint32_t>(*p, "partitions");
      if (sc.config.partitions == 0) throw ScenarioError("partitions: must be positive");
    }
  }
  const auto map = top.value<std::string>("partition_map", per_key ? "identity" : "range");
  if (map == "range") {
    sc.partition_map = PartitionMap::Range;
  } else if (map == "modulo") {
    sc.partition_map = PartitionMap::Modulo;
  } else if (map == "identity") {
    sc.partition_map = PartitionMap::Identity;
  } else {
    throw ScenarioError("partition_map: unknown map '" + map + "'");
  }
  if (per_key) {
    if (sc.partition_map != PartitionMap::Identity) throw ScenarioError("partitions: per_key needs the identity map");
    const auto& w = sc.workload;
    std::uint64_t keys = 1;
    if (w.kind == WorkloadKind::Conflict) {
      keys = std::uint64_t{w.clients_per_site} * sc.topology.size() + 1;
    } else if (w.kind == WorkloadKind::Zipf) {
      keys = w.keys;
    } else {
      throw ScenarioError("partitions: per_key needs a conflict or zipf workload");
    }
    sc.config.partitions = static_cast<std::uint32_t>(keys);
  }

  if (const json* p = top.get("protocol")) {
    Fields pf(*p, "protocol");
    sc.config.piggyback_promises = pf.value<bool>("piggyback_promises", true);
    sc.config.mbump = pf.value<bool>("mbump", true);
    sc.config.promise_period = pf.millis_field("promise_period_ms", sc.config.promise_period);
    sc.config.recovery_timeout = pf.millis_field("recovery_timeout_ms", 0);
    sc.detection_period = pf.millis_field("detection_period_ms", sc.detection_period);
    pf.done();
  }
  if (const json* ic = top.get("initial_clocks")) {
    for (const auto& e : array_at(*ic, "initial_clocks")) {
      Fields c(e, "initial_clocks[]");
      ClockSeed seed;
      seed.process = process_at(c.need("process"), "initial_clocks[].process");
      seed.clock = Fields::as<std::uint64_t>(c.need("clock"), "initial_clocks[].clock");
      c.done();
      sc.initial_clocks.push_back(seed);
    }
  }
  if (const json* f = top.get("faults")) parse_faults(*f, sc);
  if (const json* c = top.get("checks")) {
    Fields cf(*c, "checks");
    sc.check_liveness = cf.value<bool>("liveness", true);
    sc.self_test = cf.value<bool>("self_test", false);
    cf.done();
  }
  sc.horizon = top.millis_field("horizon_ms", 0);
  top.done();

  try {
    sc.finalize();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace tsr
