#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trailnet/contract_set.hpp"

namespace trailnet {

using AgentId = std::string;
using ContractId = std::string;

struct Contract {
  ContractId id;
  AgentId seller;
  AgentId buyer;
  std::optional<std::string> label;
  /// Set only for contracts generated from a priced trade grid (label = trade id).
  std::optional<long long> price;
};

/// Unvalidated network description, as read from input.
struct NetworkDescription {
  std::vector<AgentId> agents;
  std::vector<Contract> contracts;
};

/// A validated directed contract multigraph. Contracts keep declaration order;
/// every set-valued query works on ContractSet masks indexed by that order.
class ContractNetwork {
 public:
  ContractNetwork() = default;

  std::size_t agent_count() const { return agents_.size(); }
  std::size_t contract_count() const { return contracts_.size(); }

  const std::vector<AgentId>& agents() const { return agents_; }
  const std::vector<Contract>& contracts() const { return contracts_; }
  const Contract& contract(ContractIndex i) const { return contracts_[i]; }

  AgentIndex seller(ContractIndex i) const { return seller_[i]; }
  AgentIndex buyer(ContractIndex i) const { return buyer_[i]; }

  std::optional<AgentIndex> find_agent(const AgentId& id) const;
  std::optional<ContractIndex> find_contract(const ContractId& id) const;
  AgentIndex agent_index(const AgentId& id) const;        // throws InputError
  ContractIndex contract_index(const ContractId& id) const;  // throws InputError

  ContractSet all() const { return ContractSet::first(contracts_.size()); }
  /// X_f
  ContractSet contracts_of(AgentIndex f) const { return upstream_[f] | downstream_[f]; }
  /// X^B_f: contracts where f is the buyer.
  ContractSet upstream(AgentIndex f) const { return upstream_[f]; }
  /// X^S_f: contracts where f is the seller.
  ContractSet downstream(AgentIndex f) const { return downstream_[f]; }
  /// Agents involved in any contract of `set`.
  std::vector<AgentIndex> agents_of(ContractSet set) const;

  ContractSet to_set(const std::vector<ContractId>& ids) const;  // throws InputError
  /// Ids of the set, sorted by id.
  std::vector<ContractId> to_ids(ContractSet set) const;

  NetworkDescription describe() const { return {agents_, contracts_}; }

 private:
  friend ContractNetwork validate_network(const NetworkDescription&);

  std::vector<AgentId> agents_;
  std::vector<Contract> contracts_;
  std::vector<AgentIndex> seller_;
  std::vector<AgentIndex> buyer_;
  std::vector<ContractSet> upstream_;
  std::vector<ContractSet> downstream_;
  std::unordered_map<AgentId, AgentIndex> agent_lookup_;
  std::unordered_map<ContractId, ContractIndex> contract_lookup_;
};

/// Checks every invariant and collects all problems; throws ValidationError listing them.
ContractNetwork validate_network(const NetworkDescription& raw);

/// A nonempty sequence of distinct contracts where each buyer sells the next contract.
using Trail = std::vector<ContractIndex>;

/// Every trail of length <= max_len, ordered lexicographically by contract-id sequence.
/// max_len == 0 means |X|.
std::vector<Trail> enumerate_trails(const ContractNetwork& net, std::size_t max_len = 0);

bool is_trail(const ContractNetwork& net, const Trail& t);
/// All agents F(T) distinct.
bool is_chain(const ContractNetwork& net, const Trail& t);
/// Last buyer sells the first contract.
bool is_circuit(const ContractNetwork& net, const Trail& t);
bool is_acyclic(const ContractNetwork& net);

/// Lexicographic comparison of two trails by contract id, used for every
/// "first witness" rule: shorter trails first, then by id sequence.
bool trail_before(const ContractNetwork& net, const Trail& a, const Trail& b);

struct TerminalPartition {
  std::vector<AgentIndex> terminal_sellers;
  std::vector<AgentIndex> terminal_buyers;
};

/// Isolated agents (no contracts) land in both sets.
TerminalPartition terminal_partition(const ContractNetwork& net);
bool is_terminal_seller(const ContractNetwork& net, AgentIndex f);
bool is_terminal_buyer(const ContractNetwork& net, AgentIndex f);
/// A_T: contracts of `set` involving at least one terminal agent.
ContractSet terminal_contracts(const ContractNetwork& net, ContractSet set);

}  // namespace trailnet
