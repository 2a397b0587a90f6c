#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trailnet/fixed_point.hpp"
#include "trailnet/market.hpp"

namespace trailnet {

enum class EntrySide { terminal_seller, terminal_buyer };

struct EntryEvent {
  AgentId new_agent;
  EntrySide side = EntrySide::terminal_seller;
  std::vector<Contract> contracts;
  ChoiceSpec choice;
  /// Replacement choice functions for counterparties; each must agree with
  /// the old one on offers made only of old contracts.
  std::map<AgentId, ChoiceSpec> updated_choices;
};

/// Result of adding or removing an agent. Old agents and contracts keep their
/// relative order; `to_old` maps each contract of `market` back to the
/// contract index it had before, if any.
struct Surgery {
  Market market;
  std::vector<std::optional<ContractIndex>> to_old;
  std::vector<std::optional<AgentIndex>> agent_to_old;
};

/// Appends the entrant and its contracts. Throws InputError when the entrant
/// exists already, a contract does not connect it on the declared side, or an
/// updated choice function disagrees with the old one.
Surgery apply_entry(const Market& market, const EntryEvent& event);

/// Removes a terminal agent and its contracts; counterparties keep their
/// choice functions restricted to the remaining contracts.
Surgery apply_exit(const Market& market, const AgentId& agent);

struct PreferenceCheck {
  AgentIndex agent = 0;  // index in the larger market
  std::string role;      // "terminal_seller" or "terminal_buyer"
  std::string comparison;  // "max", "min" or "readjusted"
  /// True when the agent is expected to prefer the outcome before the event.
  bool expects_before = true;
  bool holds = true;
};

struct StaticsReport {
  bool preconditions_met = true;
  std::vector<std::string> unmet;  // "agent: axiom" entries
  ContractSet before_max, before_min;  // indices of the market before the event
  ContractSet after_max, after_min;    // indices of the market after the event
  std::vector<PreferenceCheck> checks;
  bool all_hold = true;
};

/// Buyer- and seller-optimal outcomes before and after entry, and the
/// preference directions for agents terminal in both markets (entrant excluded).
StaticsReport entry_comparative_statics(const Market& market, const EntryEvent& event);
StaticsReport exit_comparative_statics(const Market& market, const AgentId& agent);

struct ReadjustmentReport {
  OfferPair seed;     // in the new market
  FixedPointResult result;
  ContractSet before;  // old market indices
  ContractSet after;   // new market indices
  std::vector<PreferenceCheck> checks;
  bool all_hold = true;
};

/// Iterates the new Φ from the old fixed point with the entrant's contracts
/// added to the seller side (seller entry) or buyer side (buyer entry).
/// `pair` defaults to the canonical pair of `a`; a supplied pair must be a
/// fixed point of the old market with outcome `a`.
ReadjustmentReport market_readjustment(const Market& market, ContractSet a,
                                       const EntryEvent& event,
                                       std::optional<OfferPair> pair = std::nullopt);

struct RuralHospitalsReport {
  bool preconditions_met = true;
  std::vector<std::string> unmet;
  std::vector<ContractSet> outcomes;
  std::vector<long long> balance;  // per agent |A^B_f| - |A^S_f| in the first outcome
  bool invariant = true;
  std::optional<AgentIndex> counterexample_agent;
};

RuralHospitalsReport rural_hospitals_check(const Market& market, unsigned jobs = 1);

}  // namespace trailnet
