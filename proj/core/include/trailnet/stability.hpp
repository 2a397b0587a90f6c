#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "trailnet/market.hpp"

namespace trailnet {

enum class Notion { acceptable, trail, full_trail, chain, set, strong_trail };
inline constexpr std::array<Notion, 6> kAllNotions = {Notion::acceptable, Notion::trail,
                                                      Notion::full_trail, Notion::chain,
                                                      Notion::set,        Notion::strong_trail};

/// "acceptable", "trail", "full-trail", "chain", "set", "strong-trail".
const char* notion_name(Notion n);
/// Accepts the names above and their snake_case spellings.
std::optional<Notion> parse_notion(const std::string& name);

struct StabilityVerdict {
  Notion notion = Notion::acceptable;
  bool stable = true;
  /// Set when A itself is not acceptable; names the first agent that objects.
  std::optional<AgentIndex> rejecting_agent;
  std::optional<Trail> blocking_trail;
  std::optional<ContractSet> blocking_set;
  /// For trail-stability witnesses: which of the two intermediate conditions
  /// the witness satisfies for every intermediate agent.
  bool prefix_option = false;
  bool suffix_option = false;
};

struct StabilityOptions {
  /// Accept a trail when each intermediate agent satisfies the prefix or the
  /// suffix condition, chosen per agent, instead of one option for all.
  bool per_agent_options = false;
  std::size_t max_trails = 1'000'000;
  std::size_t max_free_contracts = 20;
  unsigned jobs = 1;
};

StabilityVerdict check_acceptable(const Market& market, ContractSet a);
/// Blocking trails (prefix/suffix conditions).
StabilityVerdict find_blocking_trail(const Market& market, ContractSet a,
                                     const StabilityOptions& opts = {});
/// Locally blocking trails (consecutive pairs).
StabilityVerdict find_locally_blocking_trail(const Market& market, ContractSet a,
                                             const StabilityOptions& opts = {});
StabilityVerdict find_blocking_chain(const Market& market, ContractSet a,
                                     const StabilityOptions& opts = {});
StabilityVerdict find_blocking_set(const Market& market, ContractSet a,
                                   const StabilityOptions& opts = {});
StabilityVerdict find_blocking_strong_trail(const Market& market, ContractSet a,
                                            const StabilityOptions& opts = {});

StabilityVerdict check_stability(const Market& market, ContractSet a, Notion notion,
                                 const StabilityOptions& opts = {});

struct StabilityProfile {
  std::array<StabilityVerdict, 6> verdicts;  // indexed like kAllNotions
  /// False when set ⇒ full-trail ⇒ trail failed and the choice functions turned
  /// out not to be fully substitutable with IRC, so the diagram does not apply.
  bool diagram_applies = true;

  const StabilityVerdict& operator[](Notion n) const {
    return verdicts[static_cast<std::size_t>(n)];
  }
};

/// Runs every checker and confirms the implication diagram. Throws DomainError
/// when an implication fails that must hold on this input.
StabilityProfile classify(const Market& market, ContractSet a, const StabilityOptions& opts = {});

/// Every blocking trail of a trail-based notion (trail, full-trail, chain,
/// strong-trail), in witness order. The first entry is the witness the
/// matching finder reports. Throws GuardExceeded when X \ A has more than
/// 12 contracts or the trail count passes opts.max_trails.
std::vector<StabilityVerdict> all_blocking_trails(const Market& market, ContractSet a, Notion notion,
                                                  const StabilityOptions& opts = {});

/// Replays a witness against the raw definition of its notion.
bool witness_blocks(const Market& market, ContractSet a, const StabilityVerdict& verdict);

}  // namespace trailnet
