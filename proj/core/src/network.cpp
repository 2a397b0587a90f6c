#include "trailnet/network.hpp"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "trailnet/error.hpp"

namespace trailnet {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid network";
  for (const auto& p : problems) out += "; " + p;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : InputError(join_problems(problems)), problems_(std::move(problems)) {}

std::optional<AgentIndex> ContractNetwork::find_agent(const AgentId& id) const {
  auto it = agent_lookup_.find(id);
  if (it == agent_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ContractIndex> ContractNetwork::find_contract(const ContractId& id) const {
  auto it = contract_lookup_.find(id);
  if (it == contract_lookup_.end()) return std::nullopt;
  return it->second;
}

AgentIndex ContractNetwork::agent_index(const AgentId& id) const {
  if (auto f = find_agent(id)) return *f;
  throw InputError("unknown agent '" + id + "'");
}

ContractIndex ContractNetwork::contract_index(const ContractId& id) const {
  if (auto x = find_contract(id)) return *x;
  throw InputError("unknown contract '" + id + "'");
}

std::vector<AgentIndex> ContractNetwork::agents_of(ContractSet set) const {
  std::vector<bool> seen(agents_.size(), false);
  for (ContractIndex x : set) {
    seen[seller_[x]] = true;
    seen[buyer_[x]] = true;
  }
  std::vector<AgentIndex> out;
  for (AgentIndex f = 0; f < seen.size(); ++f)
    if (seen[f]) out.push_back(f);
  return out;
}

ContractSet ContractNetwork::to_set(const std::vector<ContractId>& ids) const {
  ContractSet out;
  for (const auto& id : ids) out.insert(contract_index(id));
  return out;
}

std::vector<ContractId> ContractNetwork::to_ids(ContractSet set) const {
  std::vector<ContractId> out;
  for (ContractIndex x : set) out.push_back(contracts_[x].id);
  std::sort(out.begin(), out.end());
  return out;
}

ContractNetwork validate_network(const NetworkDescription& raw) {
  std::vector<std::string> problems;
  ContractNetwork net;

  for (const auto& a : raw.agents) {
    if (a.empty()) {
      problems.push_back("empty agent id");
      continue;
    }
    if (!net.agent_lookup_.emplace(a, net.agents_.size()).second) {
      problems.push_back("duplicate agent '" + a + "'");
      continue;
    }
    net.agents_.push_back(a);
  }
  if (raw.contracts.size() > kMaxContracts)
    problems.push_back("network has " + std::to_string(raw.contracts.size()) +
                       " contracts; at most " + std::to_string(kMaxContracts) +
                       " are supported");

  std::unordered_set<ContractId> ids;
  for (const auto& c : raw.contracts) {
    bool ok = true;
    if (c.id.empty()) {
      problems.push_back("empty contract id");
      ok = false;
    } else if (!ids.insert(c.id).second) {
      problems.push_back("duplicate contract id '" + c.id + "'");
      ok = false;
    }
    if (c.seller == c.buyer) {
      problems.push_back("self-loop: contract '" + c.id + "' has seller = buyer = '" +
                         c.seller + "'");
      ok = false;
    }
    if (!net.agent_lookup_.count(c.seller)) {
      problems.push_back("contract '" + c.id + "' references unknown agent '" + c.seller + "'");
      ok = false;
    }
    if (!net.agent_lookup_.count(c.buyer)) {
      problems.push_back("contract '" + c.id + "' references unknown agent '" + c.buyer + "'");
      ok = false;
    }
    if (ok) net.contracts_.push_back(c);
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  net.upstream_.assign(net.agents_.size(), ContractSet{});
  net.downstream_.assign(net.agents_.size(), ContractSet{});
  for (ContractIndex i = 0; i < net.contracts_.size(); ++i) {
    const auto& c = net.contracts_[i];
    AgentIndex s = net.agent_lookup_.at(c.seller);
    AgentIndex b = net.agent_lookup_.at(c.buyer);
    net.seller_.push_back(s);
    net.buyer_.push_back(b);
    net.downstream_[s].insert(i);
    net.upstream_[b].insert(i);
    net.contract_lookup_.emplace(c.id, i);
  }
  return net;
}

bool is_trail(const ContractNetwork& net, const Trail& t) {
  if (t.empty()) return false;
  ContractSet seen;
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (t[m] >= net.contract_count() || seen.contains(t[m])) return false;
    seen.insert(t[m]);
    if (m > 0 && net.buyer(t[m - 1]) != net.seller(t[m])) return false;
  }
  return true;
}

bool is_chain(const ContractNetwork& net, const Trail& t) {
  // Agents along a trail are s(x1), b(x1)=s(x2), ..., b(xM).
  std::vector<AgentIndex> agents{net.seller(t.front())};
  for (ContractIndex x : t) agents.push_back(net.buyer(x));
  std::sort(agents.begin(), agents.end());
  return std::adjacent_find(agents.begin(), agents.end()) == agents.end();
}

bool is_circuit(const ContractNetwork& net, const Trail& t) {
  return net.buyer(t.back()) == net.seller(t.front());
}

bool is_acyclic(const ContractNetwork& net) {
  // Kahn's algorithm on the agent graph.
  const std::size_t n = net.agent_count();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<AgentIndex>> out(n);
  for (ContractIndex x = 0; x < net.contract_count(); ++x) {
    out[net.seller(x)].push_back(net.buyer(x));
    ++indegree[net.buyer(x)];
  }
  std::vector<AgentIndex> ready;
  for (AgentIndex f = 0; f < n; ++f)
    if (indegree[f] == 0) ready.push_back(f);
  std::size_t removed = 0;
  while (!ready.empty()) {
    AgentIndex f = ready.back();
    ready.pop_back();
    ++removed;
    for (AgentIndex g : out[f])
      if (--indegree[g] == 0) ready.push_back(g);
  }
  return removed == n;
}

bool trail_before(const ContractNetwork& net, const Trail& a, const Trail& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [&](ContractIndex x, ContractIndex y) { return net.contract(x).id < net.contract(y).id; });
}

std::vector<Trail> enumerate_trails(const ContractNetwork& net, std::size_t max_len) {
  if (max_len == 0 || max_len > net.contract_count()) max_len = net.contract_count();

  // Contracts in id order so the depth-first walk emits trails lexicographically.
  std::vector<ContractIndex> by_id(net.contract_count());
  for (ContractIndex i = 0; i < by_id.size(); ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(), [&](ContractIndex a, ContractIndex b) {
    return net.contract(a).id < net.contract(b).id;
  });

  std::vector<Trail> out;
  Trail current;
  ContractSet used;
  std::function<void()> extend = [&] {
    out.push_back(current);
    if (current.size() == max_len) return;
    const AgentIndex at = net.buyer(current.back());
    for (ContractIndex x : by_id) {
      if (used.contains(x) || net.seller(x) != at) continue;
      current.push_back(x);
      used.insert(x);
      extend();
      used.erase(x);
      current.pop_back();
    }
  };
  for (ContractIndex x : by_id) {
    current = {x};
    used = ContractSet::single(x);
    extend();
  }
  return out;
}

bool is_terminal_seller(const ContractNetwork& net, AgentIndex f) {
  return net.upstream(f).empty();
}

bool is_terminal_buyer(const ContractNetwork& net, AgentIndex f) {
  return net.downstream(f).empty();
}

TerminalPartition terminal_partition(const ContractNetwork& net) {
  TerminalPartition out;
  for (AgentIndex f = 0; f < net.agent_count(); ++f) {
    if (is_terminal_seller(net, f)) out.terminal_sellers.push_back(f);
    if (is_terminal_buyer(net, f)) out.terminal_buyers.push_back(f);
  }
  return out;
}

ContractSet terminal_contracts(const ContractNetwork& net, ContractSet set) {
  ContractSet out;
  for (ContractIndex x : set) {
    if (is_terminal_seller(net, net.seller(x)) || is_terminal_buyer(net, net.buyer(x)))
      out.insert(x);
  }
  return out;
}

}  // namespace trailnet
