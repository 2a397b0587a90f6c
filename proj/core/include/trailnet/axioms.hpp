#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trailnet/choice.hpp"
#include "trailnet/market.hpp"

namespace trailnet {

/// A counterexample: named contract sets plus an optional distinguished contract.
struct AxiomWitness {
  std::map<std::string, ContractSet> sets;
  std::optional<ContractIndex> contract;
  std::string detail;
  std::vector<double> intensity;  // simplicity witnesses only
};

struct AxiomReport {
  std::string axiom;
  AgentIndex agent = 0;
  bool holds = true;
  std::optional<AxiomWitness> witness;
  std::vector<std::string> notes;
};

inline constexpr std::size_t kMaxAxiomContracts = 16;
inline constexpr std::size_t kMaxSeparabilityContracts = 12;

/// A is (W,f)-rational: A_f ⊆ C^f(W_f ∪ A_f).
bool is_w_rational(const ChoiceFunction& cf, ContractSet a, ContractSet w);
/// Neither {y} nor {z} is (W,f)-rational but {y,z} is. Throws InputError
/// unless y is upstream and z downstream for the agent.
bool is_rational_pair(const ChoiceFunction& cf, ContractIndex y, ContractIndex z, ContractSet w);

// Every checker throws GuardExceeded when the agent has more contracts than
// its guard allows.
AxiomReport check_irc(const ChoiceFunction& cf);
/// SSS and CSC on both sides.
AxiomReport check_full_substitutability(const ChoiceFunction& cf);
AxiomReport check_lad_las(const ChoiceFunction& cf);
AxiomReport check_separability(const ChoiceFunction& cf);
/// `intensity` is indexed by global contract index. Only individually rational
/// sets with at least one downstream contract are constrained.
AxiomReport check_simplicity(const ChoiceFunction& cf, const std::vector<double>& intensity);
AxiomReport check_w_contraction(const ChoiceFunction& cf);

// Priced axioms. Contracts sharing a label and carrying a price are the
// price grid of one trade; other contracts are ignored.
AxiomReport check_feasibility(const Market& market, AgentIndex f);
/// CP1 for the agent's upstream trades, CP2 for its downstream trades and CP3
/// for every trade it takes part in.
AxiomReport check_cp(const Market& market, AgentIndex f);
AxiomReport check_pm(const Market& market, AgentIndex f);

/// An intensity under which `cf` is simple, when one exists among the
/// orderings the search tries (the agent's own intensity for simple_intensity
/// specs, otherwise every ranking of X_f up to 8 contracts).
std::optional<std::vector<double>> find_intensity(const Market& market, AgentIndex f);

/// Names accepted by run_axiom: irc, full_substitutability, lad_las,
/// separability, simplicity, w_contraction, feasibility, cp, pm.
const std::vector<std::string>& axiom_names();
/// Runs one named axiom for one agent of a market.
AxiomReport run_axiom(const Market& market, AgentIndex f, const std::string& axiom);

/// Replays a failing report's witness through the raw definition; true when
/// the violation reproduces.
bool witness_reproduces(const Market& market, const AxiomReport& report);

/// Conjunction over agents; returns the first failing report, if any.
std::optional<AxiomReport> first_failure(const Market& market,
                                         const std::vector<std::string>& axioms);

}  // namespace trailnet
