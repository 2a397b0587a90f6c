#pragma once

#include <string>
#include <vector>

#include "trailnet/axioms.hpp"
#include "trailnet/fixed_point.hpp"
#include "trailnet/market.hpp"

namespace trailnet {

struct Trade {
  std::string id;
  AgentId seller;
  AgentId buyer;
  long long price_min = 0;
  long long price_max = 0;
};

/// Unvalidated priced economy as read from input.
struct PricedDescription {
  std::vector<AgentId> agents;  // when empty, taken from trades in order of appearance
  std::vector<Trade> trades;
  std::vector<std::pair<AgentId, ChoiceSpec>> choice_functions;
};

/// Expands every trade into one contract per integer price in
/// [price_min, price_max], with id "<trade>@<price>", label = trade id.
class PricedMarket {
 public:
  explicit PricedMarket(const PricedDescription& description);

  const Market& market() const { return market_; }
  const ContractNetwork& network() const { return market_.network(); }
  const std::vector<Trade>& trades() const { return trades_; }

  std::size_t trade_of(ContractIndex x) const { return trade_of_[x]; }
  long long price_of(ContractIndex x) const { return price_of_[x]; }
  /// Throws InputError for prices outside the trade's grid.
  ContractIndex contract_at(std::size_t trade, long long price) const;
  ContractSet contracts_of_trade(std::size_t trade) const { return by_trade_[trade]; }
  std::size_t trade_index(const std::string& id) const;  // throws InputError

 private:
  std::vector<Trade> trades_;
  Market market_;
  std::vector<std::size_t> trade_of_;
  std::vector<long long> price_of_;
  std::vector<ContractSet> by_trade_;
};

/// [Ψ; p]: realized trades plus one price for every trade (indexed by trade).
struct Arrangement {
  std::vector<bool> realized;
  std::vector<long long> prices;
};

/// κ([Ψ; p]) restricted to the trades flagged in `which`.
ContractSet arrangement_contracts(const PricedMarket& pm, const std::vector<bool>& which,
                                  const std::vector<long long>& prices);

/// Feasibility, CP, PM, full substitutability and IRC for every agent.
std::optional<AxiomReport> first_equilibrium_failure(const PricedMarket& pm);

enum class Perspective { buyer, seller };

struct PriceRound {
  OfferPair pair;
  /// Contracts the proposing side offers this round.
  ContractSet offered;
  /// Contracts the responding side rejects from what it sees this round.
  ContractSet rejected;
  /// Price per trade after this round's offers.
  std::vector<long long> prices;
};

struct AdjustmentResult {
  Perspective perspective = Perspective::buyer;
  FixedPointResult fixed_point;
  ContractSet outcome;
  std::vector<PriceRound> rounds;
};

/// Φ iteration from the proposing side's extreme, recording offers,
/// rejections and per-trade prices each round. When `check_preconditions`
/// is set, throws AxiomViolation unless first_equilibrium_failure is empty.
AdjustmentResult price_adjustment(const PricedMarket& pm, Perspective perspective = Perspective::buyer,
                                  bool check_preconditions = true);

/// Prices realized trades at their contract price and each unrealized trade,
/// in trade order, at the first price from its last offered price (upwards for
/// buyers, downwards for sellers) that both parties reject. Throws DomainError
/// when the search runs off the grid.
Arrangement complete_prices(const PricedMarket& pm, const AdjustmentResult& adjustment);

/// C^f(κ([Ω, p])) = κ([Ψ_f, p]) for every agent.
bool verify_competitive_equilibrium(const PricedMarket& pm, const Arrangement& arrangement);

struct TraceAudit {
  bool prices_monotone = true;   // non-decreasing for buyers, non-increasing for sellers
  bool offers_stay_open = true;  // an offer the other side has not rejected is repeated
  bool rejections_final = true;  // a rejected contract is rejected again when replayed later
  std::string detail;            // first failure, if any

  bool ok() const { return prices_monotone && offers_stay_open && rejections_final; }
};

TraceAudit audit_trace(const PricedMarket& pm, const AdjustmentResult& adjustment);

}  // namespace trailnet
