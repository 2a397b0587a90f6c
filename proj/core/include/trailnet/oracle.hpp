#pragma once

#include <cstdint>
#include <memory>
#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "trailnet/dynamics.hpp"
#include "trailnet/equilibrium.hpp"
#include "trailnet/market.hpp"
#include "trailnet/stability.hpp"

namespace trailnet {

inline constexpr std::size_t kMaxBruteForceContracts = 12;

/// Every outcome that is stable for `notion`, by literal evaluation of the
/// definition over all 2^|X| outcomes and all trails. Sorted by bit pattern.
std::vector<ContractSet> brute_force_stable(const Market& market, Notion notion);

/// Two-agent network for a PARTITION instance: f buys x1..xk and sells y,
/// g buys y and sells every x_i. ∅ fails set stability iff the answer is YES.
/// Weights must be positive and sorted ascending (InputError otherwise).
Market partition_to_gs(const std::vector<long long>& weights);
/// Subset-sum DP: is there a subset with sum exactly total/2?
bool solve_partition(const std::vector<long long>& weights);

/// The 2n-contract oracle-call family; `hidden` holds n distinct 1-based indices.
Market needle_family(std::size_t n, const std::optional<std::vector<std::size_t>>& hidden);

struct NeedleProbe {
  bool empty_set_stable = true;
  std::optional<ContractSet> blocking_set;
  std::size_t evaluations = 0;  // calls to f's choice function during the scan
};
NeedleProbe probe_needle(std::size_t n, const std::optional<std::vector<std::size_t>>& hidden);

/// Profiles: "fsirc", "separable", "ladlas", "simple", "acyclic".
const std::vector<std::string>& generator_profiles();

struct GeneratorLimits {
  std::size_t max_agents = 5;
  std::size_t max_contracts = 8;
  std::size_t retry_budget = 200;
};

struct GeneratedInstance {
  Market market;
  std::uint64_t seed = 0;
  std::string profile;
  std::vector<std::string> certificates;  // axioms verified for every agent
};

/// Deterministic per (seed, profile). Throws DomainError when the retry
/// budget runs out and InputError on an unknown profile.
GeneratedInstance generate_instance(std::uint64_t seed, const std::string& profile,
                                    const GeneratorLimits& limits = {});

/// A priced economy with reservation choice functions, certified for
/// feasibility, CP, PM, full substitutability and IRC.
PricedDescription generate_priced(std::uint64_t seed);

struct EntryScenario {
  GeneratedInstance base;
  EntryEvent event;
};

/// A certified base instance plus an entry event whose post-entry market is
/// also certified for full substitutability and IRC.
EntryScenario generate_entry_scenario(std::uint64_t seed);

}  // namespace trailnet
