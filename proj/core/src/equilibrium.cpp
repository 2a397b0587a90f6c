#include "trailnet/equilibrium.hpp"

#include <set>

#include "trailnet/error.hpp"

namespace trailnet {

namespace {

Market build_priced_market(const PricedDescription& d, std::vector<Trade>& trades) {
  NetworkDescription net;
  net.agents = d.agents;
  auto mention = [&](const AgentId& a) {
    if (std::find(net.agents.begin(), net.agents.end(), a) == net.agents.end())
      net.agents.push_back(a);
  };
  if (d.agents.empty()) {
    for (const auto& t : d.trades) {
      mention(t.seller);
      mention(t.buyer);
    }
  }
  std::set<std::string> ids;
  std::size_t grid = 0;
  for (const auto& t : d.trades) {
    if (!ids.insert(t.id).second) throw InputError("duplicate trade id '" + t.id + "'");
    if (t.price_min > t.price_max)
      throw InputError("trade '" + t.id + "' has price_min above price_max");
    grid += static_cast<std::size_t>(t.price_max - t.price_min + 1);
    if (grid > kMaxContracts)
      throw InputError("price grid exceeds " + std::to_string(kMaxContracts) + " contracts");
    for (long long p = t.price_min; p <= t.price_max; ++p)
      net.contracts.push_back({t.id + "@" + std::to_string(p), t.seller, t.buyer, t.id, p});
  }
  trades = d.trades;
  ContractNetwork validated = validate_network(net);

  std::vector<std::optional<ChoiceSpec>> specs(validated.agent_count());
  for (const auto& [agent, spec] : d.choice_functions) {
    const AgentIndex f = validated.agent_index(agent);
    if (specs[f]) throw InputError("two choice functions for agent '" + agent + "'");
    specs[f] = spec;
  }
  std::vector<ChoiceSpec> all;
  for (AgentIndex f = 0; f < specs.size(); ++f) {
    if (!specs[f]) throw InputError("no choice function for agent '" + validated.agents()[f] + "'");
    all.push_back(*specs[f]);
  }
  return Market::from_specs(std::move(validated), std::move(all));
}

}  // namespace

PricedMarket::PricedMarket(const PricedDescription& description)
    : market_(build_priced_market(description, trades_)) {
  const auto& net = market_.network();
  trade_of_.resize(net.contract_count());
  price_of_.resize(net.contract_count());
  by_trade_.resize(trades_.size());
  for (ContractIndex x = 0; x < net.contract_count(); ++x) {
    const std::size_t t = trade_index(*net.contract(x).label);
    trade_of_[x] = t;
    price_of_[x] = *net.contract(x).price;
    by_trade_[t].insert(x);
  }
}

std::size_t PricedMarket::trade_index(const std::string& id) const {
  for (std::size_t t = 0; t < trades_.size(); ++t)
    if (trades_[t].id == id) return t;
  throw InputError("unknown trade '" + id + "'");
}

ContractIndex PricedMarket::contract_at(std::size_t trade, long long price) const {
  const auto& t = trades_.at(trade);
  if (price < t.price_min || price > t.price_max)
    throw InputError("price " + std::to_string(price) + " is outside the grid of trade '" + t.id + "'");
  for (ContractIndex x : by_trade_[trade])
    if (price_of_[x] == price) return x;
  throw InputError("no contract for trade '" + t.id + "' at price " + std::to_string(price));
}

ContractSet arrangement_contracts(const PricedMarket& pm, const std::vector<bool>& which,
                                  const std::vector<long long>& prices) {
  ContractSet out;
  for (std::size_t t = 0; t < pm.trades().size(); ++t)
    if (which.at(t)) out.insert(pm.contract_at(t, prices.at(t)));
  return out;
}

std::optional<AxiomReport> first_equilibrium_failure(const PricedMarket& pm) {
  return first_failure(pm.market(), {"feasibility", "cp", "pm", "full_substitutability", "irc"});
}

AdjustmentResult price_adjustment(const PricedMarket& pm, Perspective perspective,
                                  bool check_preconditions) {
  if (check_preconditions) {
    if (auto bad = first_equilibrium_failure(pm))
      throw AxiomViolation("agent '" + pm.network().agents()[bad->agent] + "' fails " +
                           bad->axiom + (bad->witness && !bad->witness->detail.empty()
                                             ? " (" + bad->witness->detail + ")"
                                             : std::string()));
  }
  const Market& market = pm.market();
  const bool buyers = perspective == Perspective::buyer;
  AdjustmentResult out;
  out.perspective = perspective;
  out.fixed_point = buyers ? buyer_optimal(market, true) : seller_optimal(market, true);
  out.outcome = out.fixed_point.outcome;

  std::vector<long long> prices;
  for (const auto& t : pm.trades()) prices.push_back(buyers ? t.price_min : t.price_max);
  for (const OfferPair& p : out.fixed_point.trace) {
    PriceRound round;
    round.pair = p;
    for (const auto& cf : market.cfs()) {
      if (buyers) {
        round.offered |= cf.chosen_upstream(p.buyer_side, p.seller_side);
        round.rejected |= cf.rejected_downstream(p.seller_side, p.buyer_side);
      } else {
        round.offered |= cf.chosen_downstream(p.seller_side, p.buyer_side);
        round.rejected |= cf.rejected_upstream(p.buyer_side, p.seller_side);
      }
    }
    for (ContractIndex x : round.offered) prices[pm.trade_of(x)] = pm.price_of(x);
    round.prices = prices;
    out.rounds.push_back(std::move(round));
  }
  return out;
}

Arrangement complete_prices(const PricedMarket& pm, const AdjustmentResult& adjustment) {
  const Market& market = pm.market();
  const auto& net = pm.network();
  const std::size_t n = pm.trades().size();
  Arrangement arr;
  arr.realized.assign(n, false);
  arr.prices = adjustment.rounds.empty() ? std::vector<long long>{} : adjustment.rounds.back().prices;
  if (arr.prices.size() != n) {
    arr.prices.clear();
    for (const auto& t : pm.trades())
      arr.prices.push_back(adjustment.perspective == Perspective::buyer ? t.price_min : t.price_max);
  }
  for (ContractIndex x : adjustment.outcome) {
    const std::size_t t = pm.trade_of(x);
    if (arr.realized[t]) throw DomainError("outcome holds two prices for trade '" + pm.trades()[t].id + "'");
    arr.realized[t] = true;
    arr.prices[t] = pm.price_of(x);
  }

  const bool upward = adjustment.perspective == Perspective::buyer;
  for (std::size_t t = 0; t < n; ++t) {
    if (arr.realized[t]) continue;
    std::vector<bool> others(n, true);
    others[t] = false;
    const ContractSet menu = arrangement_contracts(pm, others, arr.prices);
    const auto& trade = pm.trades()[t];
    const auto& seller = market.cf(net.seller(pm.contract_at(t, trade.price_min)));
    const auto& buyer = market.cf(net.buyer(pm.contract_at(t, trade.price_min)));
    bool found = false;
    for (long long p = arr.prices[t]; p >= trade.price_min && p <= trade.price_max; p += upward ? 1 : -1) {
      const ContractIndex x = pm.contract_at(t, p);
      const ContractSet offer = menu | ContractSet::single(x);
      if (!seller.choose(offer).contains(x) && !buyer.choose(offer).contains(x)) {
        arr.prices[t] = p;
        found = true;
        break;
      }
    }
    if (!found)
      throw DomainError("no price on the grid of trade '" + trade.id +
                        "' is rejected by both parties; complete prices fail");
  }
  return arr;
}

bool verify_competitive_equilibrium(const PricedMarket& pm, const Arrangement& arrangement) {
  const std::size_t n = pm.trades().size();
  if (arrangement.realized.size() != n || arrangement.prices.size() != n) return false;
  ContractSet menu, realized;
  try {
    menu = arrangement_contracts(pm, std::vector<bool>(n, true), arrangement.prices);
    realized = arrangement_contracts(pm, arrangement.realized, arrangement.prices);
  } catch (const InputError&) {
    return false;
  }
  for (const auto& cf : pm.market().cfs())
    if (cf.choose(menu) != (realized & cf.own())) return false;
  return true;
}

TraceAudit audit_trace(const PricedMarket& pm, const AdjustmentResult& adjustment) {
  TraceAudit audit;
  const Market& market = pm.market();
  const auto& net = pm.network();
  const bool buyers = adjustment.perspective == Perspective::buyer;
  const auto& rounds = adjustment.rounds;
  auto note = [&](const std::string& s) {
    if (audit.detail.empty()) audit.detail = s;
  };

  for (std::size_t r = 1; r < rounds.size(); ++r) {
    for (std::size_t t = 0; t < pm.trades().size(); ++t) {
      const long long before = rounds[r - 1].prices[t], after = rounds[r].prices[t];
      if (buyers ? after < before : after > before) {
        audit.prices_monotone = false;
        note("price of trade '" + pm.trades()[t].id + "' moved against the process in round " +
             std::to_string(r));
      }
    }
    // An offer the other side did not reject stays available and is made again.
    const ContractSet still_open =
        rounds[r - 1].offered & (buyers ? rounds[r].pair.buyer_side : rounds[r].pair.seller_side);
    if (!still_open.subset_of(rounds[r].offered)) {
      audit.offers_stay_open = false;
      note("an open offer was withdrawn in round " + std::to_string(r));
    }
  }
  // A contract rejected in round r stays rejected when replayed in any later round.
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    for (ContractIndex x : rounds[r].rejected) {
      for (std::size_t s = r; s < rounds.size(); ++s) {
        const auto& p = rounds[s].pair;
        const ContractSet single = ContractSet::single(x);
        const bool rejected =
            buyers ? market.cf(net.seller(x)).rejected_downstream(p.seller_side | single, p.buyer_side).contains(x)
                   : market.cf(net.buyer(x)).rejected_upstream(p.buyer_side | single, p.seller_side).contains(x);
        if (!rejected) {
          audit.rejections_final = false;
          note("contract '" + net.contract(x).id + "' rejected in round " + std::to_string(r) +
               " is accepted in round " + std::to_string(s));
        }
      }
    }
  }
  return audit;
}

}  // namespace trailnet
