#pragma once

#include <string>
#include <vector>

#include "trailnet/io.hpp"
#include "trailnet/market.hpp"
#include "trailnet/network.hpp"

namespace trailnet::test {

inline std::string data_path(const std::string& rel) {
  return std::string(TRAILNET_DATA_DIR) + "/" + rel;
}

inline Market load(const std::string& name) {
  return parse_market(read_file(data_path("instances/" + name + ".json")));
}

inline ContractSet ids(const Market& m, const std::vector<ContractId>& v) {
  return m.network().to_set(v);
}

inline Trail trail(const Market& m, const std::vector<ContractId>& v) {
  Trail t;
  for (const auto& id : v) t.push_back(m.network().contract_index(id));
  return t;
}

inline NetworkDescription line_network() {
  // a -> b -> c, plus a second a -> b contract
  return {{"a", "b", "c"},
          {{"x1", "a", "b", {}, {}}, {"x2", "a", "b", {}, {}}, {"y", "b", "c", {}, {}}}};
}

}  // namespace trailnet::test
