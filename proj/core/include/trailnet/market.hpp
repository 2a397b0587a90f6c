#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "trailnet/choice.hpp"
#include "trailnet/network.hpp"

namespace trailnet {

/// A validated network together with one choice function per agent.
class Market {
 public:
  Market() = default;
  /// `cfs[f]` must belong to agent f and agree with the network's contract sides.
  Market(ContractNetwork net, std::vector<ChoiceFunction> cfs,
         std::vector<std::optional<ChoiceSpec>> specs = {});

  static Market from_specs(ContractNetwork net, std::vector<ChoiceSpec> specs);

  const ContractNetwork& network() const { return net_; }
  const ChoiceFunction& cf(AgentIndex f) const { return cfs_[f]; }
  const std::vector<ChoiceFunction>& cfs() const { return cfs_; }
  /// The family description the agent was built from, if any.
  const std::optional<ChoiceSpec>& spec(AgentIndex f) const { return specs_[f]; }

  /// Per-agent C^f(offered_f), keyed by agent.
  ContractSet chosen(AgentIndex f, ContractSet offered) const { return cfs_[f].choose(offered); }

  struct Rejections {
    ContractSet upstream;    // R_B(Y|Z)
    ContractSet downstream;  // R_S(Z|Y)
  };
  /// Union over agents of R_B^f(Y|Z) and R_S^f(Z|Y), one evaluation per agent.
  Rejections rejections(ContractSet y, ContractSet z) const;

 private:
  ContractNetwork net_;
  std::vector<ChoiceFunction> cfs_;
  std::vector<std::optional<ChoiceSpec>> specs_;
};

/// S ⊆ C^f(A_f ∪ S_f), restricted to f's contracts.
inline bool is_rational(const ChoiceFunction& cf, ContractSet s, ContractSet a) {
  const ContractSet mine = s & cf.own();
  return mine.subset_of(cf.choose((a | s) & cf.own()));
}

}  // namespace trailnet
