#include "tsr/kv/kv_state.hpp"

namespace tsr {

std::string KvState::apply(PartitionId p, const Command& cmd) {
  ++applied_;
  std::string out;
  auto it = cmd.accesses.find(p);
  if (it == cmd.accesses.end()) return out;
  bool first = true;
  for (Key k : it->second) {
    if (!first) out += ',';
    first = false;
    if (cmd.op == OpKind::Get) {
      out += get(k);
      continue;
    }
    auto& slot = data_[k];
    out += slot;
    slot = cmd.payload;
  }
  return out;
}

std::string KvState::get(Key k) const {
  auto it = data_.find(k);
  return it == data_.end() ? std::string{} : it->second;
}

}  // namespace tsr
