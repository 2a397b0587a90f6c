#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trailnet/contract_set.hpp"
#include "trailnet/network.hpp"

namespace trailnet {

// ---------------------------------------------------------------------------
// Family descriptions. Every family refers to contracts by id so that a
// description survives network surgery (entry/exit) and can be rebuilt.
// ---------------------------------------------------------------------------

/// Best-ranked subset contained in the offer; the empty set when none fits.
struct PreferenceListSpec {
  std::vector<std::vector<ContractId>> ranking;
};

/// Chooses the z best upstream and z best downstream offered contracts,
/// z = min(#offered upstream, #offered downstream).
struct SeparableIntensitySpec {
  std::vector<ContractId> upstream_order;    // best first
  std::vector<ContractId> downstream_order;  // best first
};

/// Highest-intensity upstream y with lowest-intensity downstream z when w(y) > w(z).
struct SimpleIntensitySpec {
  std::map<ContractId, double> intensity;
};

/// Single best offered contract out of an acceptable list.
struct UnitDemandSpec {
  std::vector<ContractId> order;  // best first; unlisted contracts are unacceptable
};

/// Independent top-q choice on each side from ranked acceptable lists.
struct ResponsiveSpec {
  std::vector<ContractId> upstream;
  std::vector<ContractId> downstream;
  std::size_t capacity_buy = 0;
  std::size_t capacity_sell = 0;
};

/// Agent f of the partition reduction: buys every x_i, sells y.
struct PartitionFSpec {
  std::vector<long long> weights;
  std::vector<ContractId> x_contracts;  // x_1..x_k, same order as weights
  ContractId y_contract;
};

/// Agent g of the partition reduction: buys y, sells every x_i.
struct PartitionGSpec {
  std::vector<long long> weights;
  std::vector<ContractId> x_contracts;
  ContractId y_contract;
};

/// Agent f of the oracle-call family: C_0^f, or C_I^f when `hidden` is set.
struct NeedleFSpec {
  std::size_t n = 0;
  std::optional<std::vector<std::size_t>> hidden;  // 1-based indices into x_contracts
  std::vector<ContractId> x_contracts;             // x_1..x_2n
  ContractId y_contract;
};

/// Explicit table: offered set -> chosen set. Offers not listed choose nothing.
struct TableSpec {
  std::vector<std::pair<std::vector<ContractId>, std::vector<ContractId>>> entries;
};

/// Priced family over a (trade, price) grid. Per trade, a buyer accepts prices
/// <= value and a seller accepts prices >= cost; per side it keeps the best
/// price per trade, then the top-capacity trades by margin.
struct ReservationSpec {
  std::map<std::string, long long> values;  // upstream trade -> reservation value
  std::map<std::string, long long> costs;   // downstream trade -> reservation cost
  std::optional<std::size_t> capacity_buy;  // unbounded when absent
  std::optional<std::size_t> capacity_sell;
};

using ChoiceSpec = std::variant<PreferenceListSpec, SeparableIntensitySpec, SimpleIntensitySpec,
                                UnitDemandSpec, ResponsiveSpec, PartitionFSpec, PartitionGSpec,
                                NeedleFSpec, TableSpec, ReservationSpec>;

std::string family_name(const ChoiceSpec& spec);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluator over global contract masks already restricted to the agent's contracts.
class ChoiceRule {
 public:
  virtual ~ChoiceRule() = default;
  virtual ContractSet choose(ContractSet offered) const = 0;
};

/// C^f for one agent. Immutable, cheap to copy, safe for concurrent use.
class ChoiceFunction {
 public:
  ChoiceFunction(AgentIndex agent, ContractSet upstream, ContractSet downstream,
                 std::shared_ptr<const ChoiceRule> rule);

  AgentIndex agent() const { return agent_; }
  ContractSet own() const { return upstream_ | downstream_; }
  ContractSet upstream() const { return upstream_; }
  ContractSet downstream() const { return downstream_; }

  /// C^f(Y_f). Contracts not involving the agent are dropped first.
  ContractSet choose(ContractSet offered) const;
  /// C_B^f(Y|Z) = C^f(Y^B_f ∪ Z^S_f) ∩ X^B_f
  ContractSet chosen_upstream(ContractSet y, ContractSet z) const;
  /// C_S^f(Z|Y) = C^f(Z^S_f ∪ Y^B_f) ∩ X^S_f
  ContractSet chosen_downstream(ContractSet z, ContractSet y) const;
  /// R_B^f(Y|Z) = Y^B_f \ C_B^f(Y|Z)
  ContractSet rejected_upstream(ContractSet y, ContractSet z) const;
  /// R_S^f(Z|Y) = Z^S_f \ C_S^f(Z|Y)
  ContractSet rejected_downstream(ContractSet z, ContractSet y) const;

 private:
  AgentIndex agent_;
  ContractSet upstream_;
  ContractSet downstream_;
  std::shared_ptr<const ChoiceRule> rule_;
};

/// Resolves a family description against a network. Throws InputError on
/// references to unknown contracts, contracts not involving the agent, or
/// malformed parameters.
ChoiceFunction build_choice(const ContractNetwork& net, AgentIndex agent, const ChoiceSpec& spec);

/// Wraps an arbitrary evaluator (test fixtures, instrumentation).
ChoiceFunction make_choice(const ContractNetwork& net, AgentIndex agent,
                           std::function<ContractSet(ContractSet)> evaluator);

/// Wraps `inner` so every evaluation increments `*counter`.
ChoiceFunction counting_choice(const ChoiceFunction& inner,
                               std::shared_ptr<std::atomic<std::size_t>> counter);

/// Carries `old` over to another network. `to_old[x]` is the index that
/// contract x of `net` had in the old network, or nullopt for a contract the
/// old function never saw; such contracts are never chosen.
ChoiceFunction remap_choice(const ChoiceFunction& old, const ContractNetwork& net,
                            AgentIndex agent,
                            const std::vector<std::optional<ContractIndex>>& to_old);

}  // namespace trailnet
