#include "trailnet/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "trailnet/axioms.hpp"
#include "trailnet/error.hpp"

namespace trailnet {

namespace {

ContractSet trail_set(const Trail& t) {
  ContractSet s;
  for (ContractIndex x : t) s.insert(x);
  return s;
}

// Literal reading of each blocking definition for one trail.
bool literally_blocks(const Market& market, ContractSet a, const Trail& t, Notion notion) {
  const auto& net = market.network();
  auto rational = [&](AgentIndex f, ContractSet s) { return is_rational(market.cf(f), s, a); };
  const std::size_t m_count = t.size();
  if (notion == Notion::strong_trail) {
    const ContractSet all = trail_set(t);
    for (AgentIndex f : net.agents_of(all))
      if (!rational(f, all & net.contracts_of(f))) return false;
    return true;
  }
  if (!rational(net.seller(t.front()), ContractSet::single(t.front()))) return false;
  if (!rational(net.buyer(t.back()), ContractSet::single(t.back()))) return false;
  // m runs over 2..M in the 1-based reading; f_m = b(x_{m-1}) = s(x_m).
  auto f_at = [&](std::size_t m) { return net.seller(t[m - 1]); };
  auto range = [&](std::size_t from, std::size_t to) {  // {x_from..x_to}, 1-based inclusive
    ContractSet s;
    for (std::size_t i = from; i <= to; ++i) s.insert(t[i - 1]);
    return s;
  };
  switch (notion) {
    case Notion::trail: {
      bool option_i = true, option_ii = true;
      for (std::size_t m = 2; m <= m_count; ++m) {
        const AgentIndex f = f_at(m);
        option_i = option_i && rational(f, range(1, m) & net.contracts_of(f));
        option_ii = option_ii && rational(f, range(m - 1, m_count) & net.contracts_of(f));
      }
      return option_i || option_ii;
    }
    case Notion::chain:
      if (!is_chain(net, t)) return false;
      [[fallthrough]];
    case Notion::full_trail:
      for (std::size_t m = 2; m <= m_count; ++m)
        if (!rational(f_at(m), range(m - 1, m))) return false;
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<ContractSet> brute_force_stable(const Market& market, Notion notion) {
  const auto& net = market.network();
  const std::size_t n = net.contract_count();
  if (n > kMaxBruteForceContracts)
    throw GuardExceeded("brute force is limited to " + std::to_string(kMaxBruteForceContracts) +
                        " contracts, got " + std::to_string(n));
  std::vector<Trail> trails;
  if (notion != Notion::acceptable && notion != Notion::set) trails = enumerate_trails(net);

  std::vector<ContractSet> out;
  for_each_subset(net.all(), [&](ContractSet a) {
    for (AgentIndex f = 0; f < net.agent_count(); ++f) {
      const ContractSet mine = a & net.contracts_of(f);
      if (market.cf(f).choose(mine) != mine) return;
    }
    bool blocked = false;
    if (notion == Notion::set) {
      for_each_subset(net.all() - a, [&](ContractSet z) {
        if (blocked || z.empty()) return;
        bool all = true;
        for (AgentIndex f : net.agents_of(z)) all = all && is_rational(market.cf(f), z, a);
        blocked = all;
      });
    } else {
      for (const Trail& t : trails) {
        if (trail_set(t).intersects(a)) continue;
        if (literally_blocks(market, a, t, notion)) {
          blocked = true;
          break;
        }
      }
    }
    if (!blocked) out.push_back(a);
  });
  std::sort(out.begin(), out.end());
  return out;
}

Market partition_to_gs(const std::vector<long long>& weights) {
  NetworkDescription d;
  d.agents = {"f", "g"};
  std::vector<ContractId> xs;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    xs.push_back("x" + std::to_string(i + 1));
    d.contracts.push_back({xs.back(), "g", "f", std::nullopt, std::nullopt});
  }
  d.contracts.push_back({"y", "f", "g", std::nullopt, std::nullopt});
  auto net = validate_network(d);
  return Market::from_specs(std::move(net),
                            {PartitionFSpec{weights, xs, "y"}, PartitionGSpec{weights, xs, "y"}});
}

bool solve_partition(const std::vector<long long>& weights) {
  const long long total = std::accumulate(weights.begin(), weights.end(), 0LL);
  if (total % 2 != 0) return false;
  const auto half = static_cast<std::size_t>(total / 2);
  std::vector<bool> reachable(half + 1, false);
  reachable[0] = true;
  for (long long w : weights) {
    for (std::size_t s = half + 1; s-- > static_cast<std::size_t>(w);)
      if (reachable[s - static_cast<std::size_t>(w)]) reachable[s] = true;
  }
  return reachable[half];
}

Market needle_family(std::size_t n, const std::optional<std::vector<std::size_t>>& hidden) {
  if (n == 0) throw InputError("needle family needs n >= 1");
  NetworkDescription d;
  d.agents = {"f", "g"};
  std::vector<ContractId> xs;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    xs.push_back("x" + std::to_string(i + 1));
    d.contracts.push_back({xs.back(), "g", "f", std::nullopt, std::nullopt});
  }
  d.contracts.push_back({"y", "f", "g", std::nullopt, std::nullopt});
  auto net = validate_network(d);
  return Market::from_specs(
      std::move(net), {NeedleFSpec{n, hidden, xs, "y"},
                       PartitionGSpec{std::vector<long long>(2 * n, 1), xs, "y"}});
}

NeedleProbe probe_needle(std::size_t n, const std::optional<std::vector<std::size_t>>& hidden) {
  const Market base = needle_family(n, hidden);
  auto counter = std::make_shared<std::atomic<std::size_t>>(0);
  std::vector<ChoiceFunction> cfs = base.cfs();
  cfs[0] = counting_choice(cfs[0], counter);
  const Market counted(base.network(), std::move(cfs));
  StabilityOptions opts;
  opts.max_free_contracts = 2 * n + 1;
  const auto v = find_blocking_set(counted, {}, opts);
  NeedleProbe out;
  out.empty_set_stable = v.stable;
  out.blocking_set = v.blocking_set;
  out.evaluations = counter->load();
  return out;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

const std::vector<std::string>& generator_profiles() {
  static const std::vector<std::string> p = {"fsirc", "separable", "ladlas", "simple", "acyclic"};
  return p;
}

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, const std::string& salt) {
  std::vector<std::uint32_t> words = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  for (char c : salt) words.push_back(static_cast<unsigned char>(c));
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

std::vector<ContractId> ids_of(const ContractNetwork& net, ContractSet s) {
  std::vector<ContractId> out;
  for (ContractIndex x : s) out.push_back(net.contract(x).id);
  return out;
}

std::vector<ContractId> shuffled(std::vector<ContractId> v, Rng& rng) {
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

enum class Family { preference_list, separable_intensity, responsive, simple_intensity, unit_demand };

ChoiceSpec random_spec(Family fam, const ContractNetwork& net, AgentIndex f, Rng& rng,
                       const std::vector<double>& shared_intensity) {
  const auto up = ids_of(net, net.upstream(f));
  const auto down = ids_of(net, net.downstream(f));
  switch (fam) {
    case Family::separable_intensity:
      return SeparableIntensitySpec{shuffled(up, rng), shuffled(down, rng)};
    case Family::responsive: {
      auto u = shuffled(up, rng), d = shuffled(down, rng);
      u.resize(uniform(rng, u.empty() ? 0 : 1, u.size()));
      d.resize(uniform(rng, d.empty() ? 0 : 1, d.size()));
      return ResponsiveSpec{u, d, uniform(rng, 1, std::max<std::size_t>(1, u.size())),
                            uniform(rng, 1, std::max<std::size_t>(1, d.size()))};
    }
    case Family::unit_demand: {
      auto all = shuffled(ids_of(net, net.contracts_of(f)), rng);
      all.resize(uniform(rng, all.empty() ? 0 : 1, all.size()));
      return UnitDemandSpec{all};
    }
    case Family::simple_intensity: {
      if (!shared_intensity.empty()) {
        SimpleIntensitySpec s;
        for (ContractIndex x : net.contracts_of(f)) s.intensity[net.contract(x).id] = shared_intensity[x];
        return s;
      }
      const auto all = ids_of(net, net.contracts_of(f));
      std::vector<int> values(all.size());
      std::iota(values.begin(), values.end(), 1);
      std::shuffle(values.begin(), values.end(), rng);
      SimpleIntensitySpec s;
      for (std::size_t i = 0; i < all.size(); ++i) s.intensity[all[i]] = values[i];
      return s;
    }
    case Family::preference_list: {
      const std::vector<ContractIndex> own(net.contracts_of(f).begin(), net.contracts_of(f).end());
      if (own.empty()) return PreferenceListSpec{};
      const std::size_t subsets = (std::size_t{1} << own.size()) - 1;
      const std::size_t k = uniform(rng, 1, std::min<std::size_t>(5, subsets));
      std::vector<std::uint64_t> codes;
      while (codes.size() < k) {
        const std::uint64_t c = uniform(rng, 1, subsets);
        if (std::find(codes.begin(), codes.end(), c) == codes.end()) codes.push_back(c);
      }
      PreferenceListSpec s;
      for (std::uint64_t c : codes) {
        std::vector<ContractId> entry;
        for (std::size_t i = 0; i < own.size(); ++i)
          if (c >> i & 1U) entry.push_back(net.contract(own[i]).id);
        s.ranking.push_back(entry);
      }
      return s;
    }
  }
  return SeparableIntensitySpec{up, down};
}

std::vector<std::string> profile_axioms(const std::string& profile) {
  if (profile == "separable") return {"irc", "full_substitutability", "separability"};
  if (profile == "ladlas") return {"irc", "full_substitutability", "lad_las"};
  if (profile == "simple") return {"irc", "full_substitutability", "simplicity"};
  return {"irc", "full_substitutability"};
}

std::vector<Family> families_for(const std::string& profile, bool terminal, bool allow_lists) {
  std::vector<Family> out;
  if (profile == "simple") {
    out = terminal ? std::vector<Family>{Family::responsive, Family::unit_demand}
                   : std::vector<Family>{Family::simple_intensity};
  } else if (terminal) {
    out = {Family::responsive, Family::unit_demand, Family::preference_list};
  } else if (profile == "separable") {
    out = {Family::separable_intensity, Family::responsive};
  } else if (profile == "ladlas") {
    out = {Family::separable_intensity, Family::responsive, Family::preference_list};
  } else {
    out = {Family::preference_list, Family::separable_intensity, Family::responsive,
           Family::simple_intensity};
  }
  if (!allow_lists) out.erase(std::remove(out.begin(), out.end(), Family::preference_list), out.end());
  return out;
}

std::optional<ContractNetwork> random_network(Rng& rng, const std::string& profile,
                                              const GeneratorLimits& limits,
                                              std::size_t max_contracts) {
  const std::size_t agents = uniform(rng, 2, std::max<std::size_t>(2, limits.max_agents));
  std::size_t contracts = uniform(rng, 1, std::max<std::size_t>(1, max_contracts));
  NetworkDescription d;
  for (std::size_t i = 0; i < agents; ++i) d.agents.push_back(std::string(1, static_cast<char>('a' + i)));
  auto add = [&](std::size_t s, std::size_t b) {
    d.contracts.push_back({"x" + std::to_string(d.contracts.size() + 1), d.agents[s], d.agents[b],
                           std::nullopt, std::nullopt});
  };
  for (std::size_t c = 0; c < contracts; ++c) {
    std::size_t s = uniform(rng, 0, agents - 1), b = uniform(rng, 0, agents - 2);
    if (b >= s) ++b;
    if (profile == "acyclic" && s > b) std::swap(s, b);
    add(s, b);
  }
  return validate_network(d);
}

bool agent_passes(const Market& market, AgentIndex f, const std::vector<std::string>& axioms) {
  for (const auto& a : axioms)
    if (!run_axiom(market, f, a).holds) return false;
  return true;
}

// One attempt: per-agent rejection sampling, then whole-instance certification.
std::optional<Market> random_market(Rng& rng, const std::string& profile,
                                    const GeneratorLimits& limits, std::size_t max_contracts,
                                    bool allow_lists) {
  auto net = random_network(rng, profile, limits, max_contracts);
  if (!net) return std::nullopt;
  const auto axioms = profile_axioms(profile);
  // Simplicity is certified with one intensity shared by both parties of a
  // contract; per-agent intensities let blocking circuits through.
  std::vector<double> shared;
  if (profile == "simple") {
    shared.resize(net->contract_count());
    std::iota(shared.begin(), shared.end(), 1.0);
    std::shuffle(shared.begin(), shared.end(), rng);
  }
  std::vector<ChoiceSpec> specs;
  for (AgentIndex f = 0; f < net->agent_count(); ++f)
    specs.push_back(SeparableIntensitySpec{ids_of(*net, net->upstream(f)),
                                           ids_of(*net, net->downstream(f))});
  for (AgentIndex f = 0; f < net->agent_count(); ++f) {
    const bool terminal = net->upstream(f).empty() || net->downstream(f).empty();
    const auto families = families_for(profile, terminal, allow_lists);
    bool placed = false;
    for (int attempt = 0; attempt < 40 && !placed; ++attempt) {
      specs[f] = random_spec(families[uniform(rng, 0, families.size() - 1)], *net, f, rng, shared);
      const Market trial = Market::from_specs(*net, specs);
      placed = agent_passes(trial, f, axioms);
    }
    if (!placed) return std::nullopt;
  }
  Market m = Market::from_specs(*net, specs);
  if (first_failure(m, axioms)) return std::nullopt;
  if (!shared.empty())
    for (AgentIndex f = 0; f < m.network().agent_count(); ++f)
      if (!check_simplicity(m.cf(f), shared).holds) return std::nullopt;
  if (profile == "acyclic" && !is_acyclic(m.network())) return std::nullopt;
  return m;
}

GeneratedInstance generate_with(std::uint64_t seed, const std::string& profile,
                                const GeneratorLimits& limits, std::size_t max_contracts,
                                bool allow_lists, const std::string& salt) {
  const auto& profiles = generator_profiles();
  if (std::find(profiles.begin(), profiles.end(), profile) == profiles.end())
    throw InputError("unknown generator profile '" + profile + "'");
  Rng rng = make_rng(seed, salt + profile);
  for (std::size_t attempt = 0; attempt < limits.retry_budget; ++attempt) {
    if (auto m = random_market(rng, profile, limits, max_contracts, allow_lists)) {
      GeneratedInstance out;
      out.market = std::move(*m);
      out.seed = seed;
      out.profile = profile;
      out.certificates = profile_axioms(profile);
      if (profile == "acyclic") out.certificates.push_back("acyclic");
      return out;
    }
  }
  throw DomainError("generator retry budget of " + std::to_string(limits.retry_budget) +
                    " exhausted for profile '" + profile + "'");
}

}  // namespace

GeneratedInstance generate_instance(std::uint64_t seed, const std::string& profile,
                                    const GeneratorLimits& limits) {
  if (limits.max_contracts > kMaxContracts) throw InputError("at most 64 contracts");
  return generate_with(seed, profile, limits, limits.max_contracts, true, "");
}

PricedDescription generate_priced(std::uint64_t seed) {
  Rng rng = make_rng(seed, "priced");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    PricedDescription d;
    const std::size_t agents = uniform(rng, 2, 4);
    for (std::size_t i = 0; i < agents; ++i) d.agents.push_back(std::string(1, static_cast<char>('a' + i)));
    const std::size_t trades = uniform(rng, 1, 3);
    const long long top = static_cast<long long>(uniform(rng, 2, 4));
    for (std::size_t t = 0; t < trades; ++t) {
      std::size_t s = uniform(rng, 0, agents - 1), b = uniform(rng, 0, agents - 2);
      if (b >= s) ++b;
      d.trades.push_back({"t" + std::to_string(t + 1), d.agents[s], d.agents[b], 0, top});
    }
    for (const auto& agent : d.agents) {
      ReservationSpec spec;
      std::size_t buys = 0, sells = 0;
      for (const auto& t : d.trades) {
        if (t.buyer == agent) {
          spec.values[t.id] = static_cast<long long>(uniform(rng, 0, static_cast<std::size_t>(top) + 1));
          ++buys;
        }
        if (t.seller == agent) {
          spec.costs[t.id] = static_cast<long long>(uniform(rng, 0, static_cast<std::size_t>(top) + 1));
          ++sells;
        }
      }
      if (buys > 1 && coin(rng, 0.3)) spec.capacity_buy = uniform(rng, 1, buys);
      if (sells > 1 && coin(rng, 0.3)) spec.capacity_sell = uniform(rng, 1, sells);
      d.choice_functions.emplace_back(agent, spec);
    }
    try {
      const PricedMarket pm(d);
      if (!first_equilibrium_failure(pm)) return d;
    } catch (const InputError&) {
    }
  }
  throw DomainError("no certified priced economy found for seed " + std::to_string(seed));
}

namespace {

// Adds `id` to a counterparty's description without changing its choices on
// offers made only of old contracts. Returns false for families that cannot
// be extended that way.
bool extend_spec(ChoiceSpec& spec, const ContractId& id, bool upstream, Rng& rng) {
  auto insert_at = [&](std::vector<ContractId>& v) {
    v.insert(v.begin() + static_cast<std::ptrdiff_t>(uniform(rng, 0, v.size())), id);
  };
  if (auto* s = std::get_if<SeparableIntensitySpec>(&spec)) {
    insert_at(upstream ? s->upstream_order : s->downstream_order);
    return true;
  }
  if (auto* s = std::get_if<ResponsiveSpec>(&spec)) {
    insert_at(upstream ? s->upstream : s->downstream);
    return true;
  }
  if (auto* s = std::get_if<UnitDemandSpec>(&spec)) {
    insert_at(s->order);
    return true;
  }
  if (auto* s = std::get_if<SimpleIntensitySpec>(&spec)) {
    // Any fresh value keeps old choices; pick a random gap between existing ones.
    std::vector<double> values;
    for (const auto& [k, v] : s->intensity) values.push_back(v);
    std::sort(values.begin(), values.end());
    const std::size_t gap = uniform(rng, 0, values.size());
    double value = 1.0;
    if (values.empty()) value = 1.0;
    else if (gap == 0) value = values.front() - 1.0;
    else if (gap == values.size()) value = values.back() + 1.0;
    else value = (values[gap - 1] + values[gap]) / 2.0;
    s->intensity[id] = value;
    return true;
  }
  return false;
}

}  // namespace

EntryScenario generate_entry_scenario(std::uint64_t seed) {
  Rng rng = make_rng(seed, "entry");
  GeneratorLimits limits;
  limits.max_contracts = 7;
  for (int attempt = 0; attempt < 200; ++attempt) {
    const auto base_seed = static_cast<std::uint64_t>(rng());
    GeneratedInstance base;
    try {
      base = generate_with(base_seed, "fsirc", limits, limits.max_contracts, false, "entry-base");
    } catch (const DomainError&) {
      continue;
    }
    const Market& m = base.market;
    const auto& net = m.network();

    EntryEvent e;
    e.new_agent = "n";
    e.side = coin(rng) ? EntrySide::terminal_seller : EntrySide::terminal_buyer;
    const bool seller = e.side == EntrySide::terminal_seller;
    const std::size_t count = uniform(rng, 1, 2);
    std::vector<ContractId> ids;
    bool ok = true;
    for (std::size_t c = 0; c < count && ok; ++c) {
      const AgentIndex partner = uniform(rng, 0, net.agent_count() - 1);
      const ContractId id = "n" + std::to_string(c + 1);
      const AgentId& pid = net.agents()[partner];
      e.contracts.push_back({id, seller ? e.new_agent : pid, seller ? pid : e.new_agent,
                             std::nullopt, std::nullopt});
      ids.push_back(id);
      auto it = e.updated_choices.find(pid);
      if (it == e.updated_choices.end())
        it = e.updated_choices.emplace(pid, *m.spec(partner)).first;
      ok = extend_spec(it->second, id, seller, rng);
    }
    if (!ok) continue;
    if (coin(rng)) {
      e.choice = UnitDemandSpec{shuffled(ids, rng)};
    } else {
      ResponsiveSpec r;
      (seller ? r.downstream : r.upstream) = shuffled(ids, rng);
      (seller ? r.capacity_sell : r.capacity_buy) = uniform(rng, 1, ids.size());
      e.choice = r;
    }
    try {
      const Surgery after = apply_entry(m, e);
      if (first_failure(after.market, {"irc", "full_substitutability"})) continue;
    } catch (const InputError&) {
      continue;
    }
    return {std::move(base), std::move(e)};
  }
  throw DomainError("no certified entry scenario found for seed " + std::to_string(seed));
}

}  // namespace trailnet
