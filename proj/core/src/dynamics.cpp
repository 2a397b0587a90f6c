#include "trailnet/dynamics.hpp"

#include <algorithm>

#include "trailnet/axioms.hpp"
#include "trailnet/error.hpp"

namespace trailnet {

namespace {

bool seller_side(const ContractNetwork& net, AgentIndex f) { return is_terminal_seller(net, f); }

Surgery rebuild(const Market& old, NetworkDescription desc,
                std::vector<std::optional<AgentIndex>> agent_to_old,
                const std::map<AgentId, ChoiceSpec>& updated, const std::optional<ChoiceSpec>& entrant) {
  ContractNetwork net = validate_network(desc);
  const auto& old_net = old.network();
  std::vector<std::optional<ContractIndex>> to_old(net.contract_count());
  for (ContractIndex x = 0; x < net.contract_count(); ++x)
    to_old[x] = old_net.find_contract(net.contract(x).id);

  std::vector<ChoiceFunction> cfs;
  std::vector<std::optional<ChoiceSpec>> specs;
  for (AgentIndex f = 0; f < net.agent_count(); ++f) {
    const AgentId& id = net.agents()[f];
    if (!agent_to_old[f]) {
      cfs.push_back(build_choice(net, f, *entrant));
      specs.emplace_back(*entrant);
      continue;
    }
    const AgentIndex g = *agent_to_old[f];
    const ChoiceFunction& before = old.cf(g);
    if (auto it = updated.find(id); it != updated.end()) {
      ChoiceFunction next = build_choice(net, f, it->second);
      // The replacement must behave like the old function on old offers.
      const ContractSet mine_old = old_net.contracts_of(g);
      if (mine_old.size() > kMaxAxiomContracts)
        throw GuardExceeded("agent '" + id + "' has too many contracts to validate its update");
      std::vector<ContractIndex> to_new(old_net.contract_count());
      for (ContractIndex x : mine_old) to_new[x] = net.contract_index(old_net.contract(x).id);
      bool agrees = true;
      for_each_subset(mine_old, [&](ContractSet s) {
        if (!agrees) return;
        ContractSet mapped, expected;
        for (ContractIndex x : s) mapped.insert(to_new[x]);
        for (ContractIndex x : before.choose(s)) expected.insert(to_new[x]);
        if (next.choose(mapped) != expected) agrees = false;
      });
      if (!agrees)
        throw InputError("updated choice function of '" + id +
                         "' disagrees with the old one on offers of old contracts");
      cfs.push_back(std::move(next));
      specs.emplace_back(it->second);
      continue;
    }
    bool untouched = true;
    for (ContractIndex x : net.contracts_of(f)) untouched = untouched && to_old[x].has_value();
    if (net.contracts_of(f).size() != old_net.contracts_of(g).size()) untouched = false;
    if (untouched && old.spec(g)) {
      cfs.push_back(build_choice(net, f, *old.spec(g)));
      specs.push_back(old.spec(g));
    } else {
      cfs.push_back(remap_choice(before, net, f, to_old));
      specs.emplace_back(std::nullopt);
    }
  }
  return {Market(std::move(net), std::move(cfs), std::move(specs)), std::move(to_old),
          std::move(agent_to_old)};
}

ContractSet to_old_indices(const Surgery& s, ContractSet set) {
  ContractSet out;
  for (ContractIndex x : set) {
    if (!s.to_old[x]) throw DomainError("outcome holds a contract of the new agent");
    out.insert(*s.to_old[x]);
  }
  return out;
}

// "f prefers A to B": C^f(A_f ∪ B_f) = A_f, evaluated in `big`.
bool prefers(const Market& big, AgentIndex f, ContractSet a, ContractSet b) {
  const auto& cf = big.cf(f);
  return cf.choose((a | b) & cf.own()) == (a & cf.own());
}

// Agents terminal on the given side in both markets, as indices of `big`.
// `small_of_big` maps an agent of `big` to its index in `small`, if present.
std::vector<AgentIndex> terminal_in_both(const ContractNetwork& big, const ContractNetwork& small,
                                         const std::vector<std::optional<AgentIndex>>& small_of_big,
                                         bool sellers) {
  std::vector<AgentIndex> out;
  for (AgentIndex f = 0; f < big.agent_count(); ++f) {
    if (!small_of_big[f]) continue;
    const AgentIndex g = *small_of_big[f];
    const bool in_big = sellers ? is_terminal_seller(big, f) : is_terminal_buyer(big, f);
    const bool in_small = sellers ? is_terminal_seller(small, g) : is_terminal_buyer(small, g);
    if (in_big && in_small) out.push_back(f);
  }
  return out;
}

void collect_unmet(const Market& m, const std::string& label, StaticsReport& r) {
  for (const char* axiom : {"irc", "full_substitutability"}) {
    for (AgentIndex f = 0; f < m.network().agent_count(); ++f) {
      if (!run_axiom(m, f, axiom).holds) {
        r.preconditions_met = false;
        r.unmet.push_back(label + " " + m.network().agents()[f] + ": " + axiom);
      }
    }
  }
}

// Shared by entry and exit. All sets are in `big` indices; `big_sellers_expect_small`
// is true when terminal sellers should prefer the outcome of the smaller market.
void add_checks(const Market& big, const std::vector<AgentIndex>& sellers,
                const std::vector<AgentIndex>& buyers, const std::string& comparison,
                ContractSet big_outcome, ContractSet small_outcome, bool sellers_prefer_small,
                bool small_is_before, std::vector<PreferenceCheck>& checks) {
  for (bool seller_role : {true, false}) {
    const bool prefer_small = seller_role ? sellers_prefer_small : !sellers_prefer_small;
    for (AgentIndex f : seller_role ? sellers : buyers) {
      PreferenceCheck c;
      c.agent = f;
      c.role = seller_role ? "terminal_seller" : "terminal_buyer";
      c.comparison = comparison;
      c.expects_before = prefer_small == small_is_before;
      c.holds = prefer_small ? prefers(big, f, small_outcome, big_outcome)
                             : prefers(big, f, big_outcome, small_outcome);
      checks.push_back(std::move(c));
    }
  }
}

std::vector<std::optional<AgentIndex>> invert(const std::vector<std::optional<AgentIndex>>& map,
                                              std::size_t size) {
  std::vector<std::optional<AgentIndex>> out(size);
  for (AgentIndex f = 0; f < map.size(); ++f)
    if (map[f]) out[*map[f]] = f;
  return out;
}

}  // namespace

Surgery apply_entry(const Market& market, const EntryEvent& event) {
  const auto& net = market.network();
  if (net.find_agent(event.new_agent))
    throw InputError("agent '" + event.new_agent + "' already exists");
  const bool sells = event.side == EntrySide::terminal_seller;
  NetworkDescription desc = net.describe();
  desc.agents.push_back(event.new_agent);
  for (const auto& c : event.contracts) {
    const AgentId& self = sells ? c.seller : c.buyer;
    const AgentId& other = sells ? c.buyer : c.seller;
    if (self != event.new_agent)
      throw InputError("contract '" + c.id + "' does not have the entrant as " +
                       (sells ? "seller" : "buyer"));
    if (!net.find_agent(other))
      throw InputError("contract '" + c.id + "' names unknown counterparty '" + other + "'");
    desc.contracts.push_back(c);
  }
  for (const auto& [agent, spec] : event.updated_choices)
    if (!net.find_agent(agent)) throw InputError("updated choice for unknown agent '" + agent + "'");

  std::vector<std::optional<AgentIndex>> agent_to_old;
  for (AgentIndex f = 0; f < net.agent_count(); ++f) agent_to_old.emplace_back(f);
  agent_to_old.emplace_back(std::nullopt);
  return rebuild(market, std::move(desc), std::move(agent_to_old), event.updated_choices, event.choice);
}

Surgery apply_exit(const Market& market, const AgentId& agent) {
  const auto& net = market.network();
  const AgentIndex gone = net.agent_index(agent);
  if (!is_terminal_seller(net, gone) && !is_terminal_buyer(net, gone))
    throw InputError("agent '" + agent + "' is not terminal");
  NetworkDescription desc;
  std::vector<std::optional<AgentIndex>> agent_to_old;
  for (AgentIndex f = 0; f < net.agent_count(); ++f) {
    if (f == gone) continue;
    desc.agents.push_back(net.agents()[f]);
    agent_to_old.emplace_back(f);
  }
  for (const auto& c : net.contracts())
    if (c.seller != agent && c.buyer != agent) desc.contracts.push_back(c);
  return rebuild(market, std::move(desc), std::move(agent_to_old), {}, std::nullopt);
}

StaticsReport entry_comparative_statics(const Market& market, const EntryEvent& event) {
  StaticsReport r;
  const Surgery after = apply_entry(market, event);
  collect_unmet(market, "before", r);
  collect_unmet(after.market, "after", r);
  if (!r.preconditions_met) {
    r.all_hold = false;
    return r;
  }
  r.before_max = buyer_optimal(market).outcome;
  r.before_min = seller_optimal(market).outcome;
  r.after_max = buyer_optimal(after.market).outcome;
  r.after_min = seller_optimal(after.market).outcome;

  // Old indices are preserved by entry, so old outcomes are valid in the new market.
  const auto& big = after.market.network();
  const auto sellers = terminal_in_both(big, market.network(), after.agent_to_old, true);
  const auto buyers = terminal_in_both(big, market.network(), after.agent_to_old, false);
  const bool seller_entry = event.side == EntrySide::terminal_seller;
  add_checks(after.market, sellers, buyers, "max", r.after_max, r.before_max, seller_entry, true, r.checks);
  add_checks(after.market, sellers, buyers, "min", r.after_min, r.before_min, seller_entry, true, r.checks);
  for (const auto& c : r.checks) r.all_hold = r.all_hold && c.holds;
  return r;
}

StaticsReport exit_comparative_statics(const Market& market, const AgentId& agent) {
  StaticsReport r;
  const Surgery after = apply_exit(market, agent);
  collect_unmet(market, "before", r);
  collect_unmet(after.market, "after", r);
  if (!r.preconditions_met) {
    r.all_hold = false;
    return r;
  }
  r.before_max = buyer_optimal(market).outcome;
  r.before_min = seller_optimal(market).outcome;
  r.after_max = buyer_optimal(after.market).outcome;
  r.after_min = seller_optimal(after.market).outcome;

  // Reverse of an entry into the smaller market: the market after exit plays
  // the role of the market before entry.
  const auto& big = market.network();
  const auto small_of_big = invert(after.agent_to_old, big.agent_count());
  const auto sellers = terminal_in_both(big, after.market.network(), small_of_big, true);
  const auto buyers = terminal_in_both(big, after.market.network(), small_of_big, false);
  const bool seller_exit = seller_side(big, big.agent_index(agent));
  const ContractSet small_max = to_old_indices(after, r.after_max);
  const ContractSet small_min = to_old_indices(after, r.after_min);
  add_checks(market, sellers, buyers, "max", r.before_max, small_max, seller_exit, false, r.checks);
  add_checks(market, sellers, buyers, "min", r.before_min, small_min, seller_exit, false, r.checks);
  for (const auto& c : r.checks) r.all_hold = r.all_hold && c.holds;
  return r;
}

ReadjustmentReport market_readjustment(const Market& market, ContractSet a, const EntryEvent& event,
                                       std::optional<OfferPair> pair) {
  const OfferPair start = pair ? *pair : canonical_pair(market, a);
  if (pair) {
    if (!(phi(market, *pair) == *pair))
      throw InputError("supplied pair is not a fixed point of the market");
    if (pair->outcome() != a) throw InputError("supplied pair does not yield the outcome");
  }
  const Surgery after = apply_entry(market, event);
  const auto& big = after.market.network();
  const ContractSet added = big.all() - market.network().all();
  const bool seller_entry = event.side == EntrySide::terminal_seller;

  ReadjustmentReport r;
  r.before = a;
  r.seed = start;
  if (seller_entry)
    r.seed.seller_side |= added;
  else
    r.seed.buyer_side |= added;
  const OfferPair first = phi(after.market, r.seed);
  if (!(first == r.seed) && !(seller_entry ? precedes(r.seed, first) : precedes(first, r.seed)))
    throw AxiomViolation(std::string("readjustment does not start ") +
                         (seller_entry ? "ascending" : "descending"));
  r.result = iterate(after.market, r.seed, true);
  r.after = r.result.outcome;

  const auto sellers = terminal_in_both(big, market.network(), after.agent_to_old, true);
  const auto buyers = terminal_in_both(big, market.network(), after.agent_to_old, false);
  add_checks(after.market, sellers, buyers, "readjusted", r.after, r.before, seller_entry, true, r.checks);
  for (const auto& c : r.checks) r.all_hold = r.all_hold && c.holds;
  return r;
}

RuralHospitalsReport rural_hospitals_check(const Market& market, unsigned jobs) {
  RuralHospitalsReport r;
  const auto& net = market.network();
  for (const char* axiom : {"full_substitutability", "lad_las"}) {
    for (AgentIndex f = 0; f < net.agent_count(); ++f) {
      if (!run_axiom(market, f, axiom).holds) {
        r.preconditions_met = false;
        r.unmet.push_back(net.agents()[f] + ": " + axiom);
      }
    }
  }
  r.outcomes = fixed_point_outcomes(enumerate_fixed_points(market, jobs));
  auto balance = [&](ContractSet s, AgentIndex f) {
    return static_cast<long long>((s & net.upstream(f)).size()) -
           static_cast<long long>((s & net.downstream(f)).size());
  };
  if (r.outcomes.empty()) return r;
  for (AgentIndex f = 0; f < net.agent_count(); ++f) r.balance.push_back(balance(r.outcomes.front(), f));
  for (AgentIndex f = 0; f < net.agent_count() && r.invariant; ++f) {
    for (const auto& o : r.outcomes) {
      if (balance(o, f) != r.balance[f]) {
        r.invariant = false;
        r.counterexample_agent = f;
        break;
      }
    }
  }
  return r;
}

}  // namespace trailnet
