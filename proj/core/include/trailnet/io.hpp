#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trailnet/dynamics.hpp"
#include "trailnet/equilibrium.hpp"
#include "trailnet/market.hpp"

namespace trailnet {

/// Whole file as a string; InputError when unreadable.
std::string read_file(const std::string& path);

/// {"agents":[...],"contracts":[...]}; other top-level keys are rejected
/// unless `allow_choice_functions` admits "choice_functions".
ContractNetwork parse_network(std::string_view text, bool allow_choice_functions = false);
/// Network plus a "choice_functions" array covering every agent.
Market parse_market(std::string_view text);
PricedDescription parse_priced(std::string_view text);
EntryEvent parse_entry(std::string_view text);
/// A JSON array of contract ids, e.g. ["w","z"].
std::vector<ContractId> parse_id_list(std::string_view text);

/// Serializes a market whose agents all carry a family description.
std::string market_to_json(const Market& market, int indent = 2);
std::string priced_to_json(const PricedDescription& description, int indent = 2);
std::string entry_to_json(const EntryEvent& event, int indent = 2);

}  // namespace trailnet
