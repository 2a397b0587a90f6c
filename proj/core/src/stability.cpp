#include "trailnet/stability.hpp"

#include <algorithm>
#include <functional>
#include <mutex>

#include "trailnet/axioms.hpp"
#include "trailnet/error.hpp"
#include "trailnet/parallel.hpp"

namespace trailnet {

const char* notion_name(Notion n) {
  switch (n) {
    case Notion::acceptable: return "acceptable";
    case Notion::trail: return "trail";
    case Notion::full_trail: return "full-trail";
    case Notion::chain: return "chain";
    case Notion::set: return "set";
    case Notion::strong_trail: return "strong-trail";
  }
  return "acceptable";
}

std::optional<Notion> parse_notion(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '_', '-');
  for (Notion x : kAllNotions)
    if (n == notion_name(x)) return x;
  return std::nullopt;
}

namespace {

ContractSet to_set(const Trail& t, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  ContractSet s;
  for (std::size_t i = from; i < t.size() && i < to; ++i) s.insert(t[i]);
  return s;
}

// The clauses of the trail definitions, evaluated on a complete or partial trail.
struct Clauses {
  const Market& market;
  ContractSet a;

  const ContractNetwork& net() const { return market.network(); }
  bool rational(AgentIndex f, ContractSet s) const { return is_rational(market.cf(f), s, a); }

  bool start(const Trail& t) const {
    return rational(net().seller(t.front()), ContractSet::single(t.front()));
  }
  bool end(const Trail& t) const {
    return rational(net().buyer(t.back()), ContractSet::single(t.back()));
  }
  // Conditions for the intermediate agent f_m = s(t[m]), 1 <= m < |t| (0-based).
  bool pair(const Trail& t, std::size_t m) const {
    return rational(net().seller(t[m]), ContractSet::single(t[m - 1]) | ContractSet::single(t[m]));
  }
  bool prefix(const Trail& t, std::size_t m) const {
    return rational(net().seller(t[m]), to_set(t, 0, m + 1));
  }
  bool suffix(const Trail& t, std::size_t m) const {
    return rational(net().seller(t[m]), to_set(t, m - 1));
  }

  bool all_prefix(const Trail& t) const {
    for (std::size_t m = 1; m < t.size(); ++m)
      if (!prefix(t, m)) return false;
    return true;
  }
  bool all_suffix(const Trail& t) const {
    for (std::size_t m = 1; m < t.size(); ++m)
      if (!suffix(t, m)) return false;
    return true;
  }
  bool mixed(const Trail& t) const {
    for (std::size_t m = 1; m < t.size(); ++m)
      if (!prefix(t, m) && !suffix(t, m)) return false;
    return true;
  }
  bool all_pairs(const Trail& t) const {
    for (std::size_t m = 1; m < t.size(); ++m)
      if (!pair(t, m)) return false;
    return true;
  }
  bool strong(const Trail& t) const {
    const ContractSet s = to_set(t);
    for (AgentIndex f : net().agents_of(s))
      if (!rational(f, s)) return false;
    return true;
  }
};

bool agents_distinct(const ContractNetwork& net, const Trail& t) { return is_chain(net, t); }

// Depth-first trail search over X \ A with children in contract-id order,
// so trails of one length are produced lexicographically.
class TrailSearch {
 public:
  TrailSearch(const Market& market, ContractSet a, const StabilityOptions& opts)
      : net_(market.network()), free_(market.network().all() - a), opts_(opts) {
    out_.resize(net_.agent_count());
    in_.resize(net_.agent_count());
    std::vector<ContractIndex> order(free_.begin(), free_.end());
    std::sort(order.begin(), order.end(), [&](ContractIndex x, ContractIndex y) {
      return net_.contract(x).id < net_.contract(y).id;
    });
    order_ = order;
    for (ContractIndex x : order) {
      out_[net_.seller(x)].push_back(x);
      in_[net_.buyer(x)].push_back(x);
    }
  }

  std::size_t max_length() const { return free_.size(); }

  // First trail of exactly `length` (in lexicographic order) whose every
  // prefix passes `extend` and which passes `accept`. `extend` sees the
  // partial trail after each append.
  std::optional<Trail> forward(std::size_t length,
                               const std::function<bool(const Trail&)>& extend,
                               const std::function<bool(const Trail&)>& accept) {
    Trail t;
    std::optional<Trail> found;
    std::function<bool()> dfs = [&]() -> bool {
      tick();
      if (t.size() == length) {
        if (accept(t)) {
          found = t;
          return true;
        }
        return false;
      }
      const auto& next = t.empty() ? order_ : out_[net_.buyer(t.back())];
      for (ContractIndex y : next) {
        if (std::find(t.begin(), t.end(), y) != t.end()) continue;
        t.push_back(y);
        if (extend(t) && dfs()) return true;
        t.pop_back();
      }
      return false;
    };
    dfs();
    return found;
  }

  // Lexicographically first trail of exactly `length`, built from the last
  // contract backwards; `extend` sees the partial suffix (front = newest).
  std::optional<Trail> backward(std::size_t length,
                                const std::function<bool(const Trail&)>& extend,
                                const std::function<bool(const Trail&)>& accept) {
    Trail t;  // kept in forward order; prepend = insert at front
    std::optional<Trail> best;
    std::function<void()> dfs = [&]() {
      tick();
      if (t.size() == length) {
        if (accept(t) && (!best || trail_before(net_, t, *best))) best = t;
        return;
      }
      const auto& prev = t.empty() ? order_ : in_[net_.seller(t.front())];
      for (ContractIndex y : prev) {
        if (std::find(t.begin(), t.end(), y) != t.end()) continue;
        t.insert(t.begin(), y);
        if (extend(t)) dfs();
        t.erase(t.begin());
      }
    };
    dfs();
    return best;
  }

 private:
  void tick() {
    if (++visited_ > opts_.max_trails)
      throw GuardExceeded("trail search visited more than " + std::to_string(opts_.max_trails) +
                          " partial trails");
  }

  const ContractNetwork& net_;
  ContractSet free_;
  StabilityOptions opts_;
  std::vector<ContractIndex> order_;
  std::vector<std::vector<ContractIndex>> out_, in_;
  std::size_t visited_ = 0;
};

StabilityVerdict unacceptable_or_stable(const Market& market, ContractSet a, Notion notion) {
  StabilityVerdict v = check_acceptable(market, a);
  v.notion = notion;
  return v;
}

StabilityVerdict with_trail(Notion notion, const Clauses& c, Trail t) {
  StabilityVerdict v;
  v.notion = notion;
  v.stable = false;
  if (notion == Notion::trail) {
    v.prefix_option = c.all_prefix(t);
    v.suffix_option = c.all_suffix(t);
  }
  v.blocking_trail = std::move(t);
  return v;
}

// Forward search for the locally blocking family (full trails and chains).
StabilityVerdict local_search(const Market& market, ContractSet a, const StabilityOptions& opts,
                              Notion notion, bool chains_only) {
  StabilityVerdict v = unacceptable_or_stable(market, a, notion);
  if (!v.stable) return v;
  const Clauses c{market, a};
  const auto& net = market.network();
  TrailSearch search(market, a, opts);
  auto extend = [&](const Trail& t) {
    if (t.size() == 1) return c.start(t);
    if (chains_only && !agents_distinct(net, t)) return false;
    return c.pair(t, t.size() - 1);
  };
  auto accept = [&](const Trail& t) { return c.end(t); };
  for (std::size_t len = 1; len <= search.max_length(); ++len)
    if (auto t = search.forward(len, extend, accept)) return with_trail(notion, c, *t);
  return v;
}

}  // namespace

StabilityVerdict check_acceptable(const Market& market, ContractSet a) {
  StabilityVerdict v;
  for (AgentIndex f = 0; f < market.network().agent_count(); ++f) {
    const auto& cf = market.cf(f);
    const ContractSet mine = a & cf.own();
    if (cf.choose(mine) != mine) {
      v.stable = false;
      v.rejecting_agent = f;
      return v;
    }
  }
  return v;
}

StabilityVerdict find_blocking_trail(const Market& market, ContractSet a,
                                     const StabilityOptions& opts) {
  StabilityVerdict v = unacceptable_or_stable(market, a, Notion::trail);
  if (!v.stable) return v;
  const Clauses c{market, a};
  TrailSearch search(market, a, opts);
  auto accept_end = [&](const Trail& t) { return c.end(t); };

  for (std::size_t len = 1; len <= search.max_length(); ++len) {
    std::optional<Trail> best;
    if (opts.per_agent_options) {
      best = search.forward(
          len, [&](const Trail& t) { return t.size() > 1 || c.start(t); },
          [&](const Trail& t) { return c.end(t) && c.mixed(t); });
    } else {
      // Option (i) constrains prefixes, so it prunes forwards; option (ii)
      // constrains suffixes, so it prunes backwards.
      best = search.forward(
          len,
          [&](const Trail& t) { return t.size() == 1 ? c.start(t) : c.prefix(t, t.size() - 1); },
          accept_end);
      auto suffix = search.backward(
          len,
          [&](const Trail& t) { return t.size() == 1 ? c.end(t) : c.suffix(t, 1); },
          [&](const Trail& t) { return c.start(t); });
      if (suffix && (!best || trail_before(market.network(), *suffix, *best))) best = suffix;
    }
    if (best) return with_trail(Notion::trail, c, *best);
  }
  return v;
}

StabilityVerdict find_locally_blocking_trail(const Market& market, ContractSet a,
                                             const StabilityOptions& opts) {
  return local_search(market, a, opts, Notion::full_trail, false);
}

StabilityVerdict find_blocking_chain(const Market& market, ContractSet a,
                                     const StabilityOptions& opts) {
  return local_search(market, a, opts, Notion::chain, true);
}

StabilityVerdict find_blocking_strong_trail(const Market& market, ContractSet a,
                                            const StabilityOptions& opts) {
  StabilityVerdict v = unacceptable_or_stable(market, a, Notion::strong_trail);
  if (!v.stable) return v;
  const Clauses c{market, a};
  TrailSearch search(market, a, opts);
  for (std::size_t len = 1; len <= search.max_length(); ++len) {
    if (auto t = search.forward(
            len, [](const Trail&) { return true; }, [&](const Trail& t) { return c.strong(t); }))
      return with_trail(Notion::strong_trail, c, *t);
  }
  return v;
}

StabilityVerdict find_blocking_set(const Market& market, ContractSet a,
                                   const StabilityOptions& opts) {
  StabilityVerdict v = unacceptable_or_stable(market, a, Notion::set);
  if (!v.stable) return v;
  const auto& net = market.network();
  const ContractSet free = net.all() - a;
  if (free.size() > opts.max_free_contracts)
    throw GuardExceeded("blocking-set search over " + std::to_string(free.size()) +
                        " free contracts exceeds the limit of " +
                        std::to_string(opts.max_free_contracts));

  const std::vector<ContractIndex> bits(free.begin(), free.end());
  const std::size_t m = bits.size();
  auto blocks = [&](ContractSet z) {
    for (AgentIndex f : net.agents_of(z))
      if (!is_rational(market.cf(f), z, a)) return false;
    return true;
  };
  // Smallest first, then lexicographic by sorted contract ids.
  auto before = [&](ContractSet x, ContractSet y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return net.to_ids(x) < net.to_ids(y);
  };
  auto expand = [&](std::uint64_t code) {
    ContractSet z;
    for (std::size_t i = 0; i < m; ++i)
      if (code >> i & 1U) z.insert(bits[i]);
    return z;
  };

  std::optional<ContractSet> best;
  if (opts.jobs <= 1) {
    for (std::size_t k = 1; k <= m && !best; ++k) {
      // Gosper's hack over k-subsets of the free positions.
      for (std::uint64_t code = (std::uint64_t{1} << k) - 1; code < (std::uint64_t{1} << m);) {
        const ContractSet z = expand(code);
        if (blocks(z) && (!best || before(z, *best))) best = z;
        const std::uint64_t c = code & (~code + 1), r = code + c;
        code = (((r ^ code) >> 2) / c) | r;
      }
    }
  } else {
    const std::uint64_t total = std::uint64_t{1} << m;
    std::mutex mu;
    const std::size_t chunks = std::min<std::uint64_t>(opts.jobs * 8, total);
    parallel_for(chunks, opts.jobs, [&](std::size_t b) {
      std::optional<ContractSet> local;
      for (std::uint64_t code = std::max<std::uint64_t>(1, total * b / chunks);
           code < total * (b + 1) / chunks; ++code) {
        const ContractSet z = expand(code);
        if ((!local || before(z, *local)) && blocks(z)) local = z;
      }
      std::lock_guard<std::mutex> lock(mu);
      if (local && (!best || before(*local, *best))) best = local;
    });
  }
  if (best) {
    v.stable = false;
    v.blocking_set = best;
  }
  return v;
}

StabilityVerdict check_stability(const Market& market, ContractSet a, Notion notion,
                                 const StabilityOptions& opts) {
  switch (notion) {
    case Notion::acceptable: return check_acceptable(market, a);
    case Notion::trail: return find_blocking_trail(market, a, opts);
    case Notion::full_trail: return find_locally_blocking_trail(market, a, opts);
    case Notion::chain: return find_blocking_chain(market, a, opts);
    case Notion::set: return find_blocking_set(market, a, opts);
    case Notion::strong_trail: return find_blocking_strong_trail(market, a, opts);
  }
  throw InputError("unknown notion");
}

StabilityProfile classify(const Market& market, ContractSet a, const StabilityOptions& opts) {
  StabilityProfile p;
  for (Notion n : kAllNotions) p.verdicts[static_cast<std::size_t>(n)] = check_stability(market, a, n, opts);
  auto stable = [&](Notion n) { return p[n].stable; };

  if (stable(Notion::trail) && !stable(Notion::chain))
    throw DomainError("internal inconsistency: trail-stable outcome has a blocking chain");
  if (stable(Notion::set) && !stable(Notion::strong_trail))
    throw DomainError("internal inconsistency: set-stable outcome has a strongly blocking trail");

  const bool conditional_ok = (!stable(Notion::set) || stable(Notion::full_trail)) &&
                              (!stable(Notion::full_trail) || stable(Notion::trail));
  if (!conditional_ok) {
    bool axioms_hold = false;
    try {
      axioms_hold = !first_failure(market, {"full_substitutability", "irc"});
    } catch (const GuardExceeded&) {
    }
    if (axioms_hold)
      throw DomainError("internal inconsistency: stability implications fail under full substitutability and IRC");
    p.diagram_applies = false;
  }
  return p;
}

std::vector<StabilityVerdict> all_blocking_trails(const Market& market, ContractSet a, Notion notion,
                                                  const StabilityOptions& opts) {
  if (notion == Notion::acceptable || notion == Notion::set)
    throw InputError(std::string("notion '") + notion_name(notion) + "' has no trail witnesses");
  const auto& net = market.network();
  if ((net.all() - a).size() > 12)
    throw GuardExceeded("listing blocking trails is limited to 12 contracts outside the outcome");
  std::vector<StabilityVerdict> out;
  if (!check_acceptable(market, a).stable) return out;
  std::size_t seen = 0;
  for (const Trail& t : enumerate_trails(net)) {
    if (to_set(t).intersects(a)) continue;
    if (++seen > opts.max_trails) throw GuardExceeded("too many trails to list");
    StabilityVerdict v;
    v.notion = notion;
    v.stable = false;
    v.blocking_trail = t;
    if (notion == Notion::trail && !opts.per_agent_options) {
      const Clauses c{market, a};
      v.prefix_option = c.all_prefix(t);
      v.suffix_option = c.all_suffix(t);
      if (!v.prefix_option && !v.suffix_option) continue;
    }
    if (witness_blocks(market, a, v)) out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(), [&](const StabilityVerdict& x, const StabilityVerdict& y) {
    return trail_before(net, *x.blocking_trail, *y.blocking_trail);
  });
  return out;
}

bool witness_blocks(const Market& market, ContractSet a, const StabilityVerdict& verdict) {
  if (verdict.stable) return false;
  const auto& net = market.network();
  if (verdict.rejecting_agent) {
    const auto& cf = market.cf(*verdict.rejecting_agent);
    return cf.choose(a & cf.own()) != (a & cf.own());
  }
  if (!check_acceptable(market, a).stable) return false;
  const Clauses c{market, a};
  if (verdict.notion == Notion::set) {
    if (!verdict.blocking_set) return false;
    const ContractSet z = *verdict.blocking_set;
    if (z.empty() || z.intersects(a)) return false;
    for (AgentIndex f : net.agents_of(z))
      if (!c.rational(f, z)) return false;
    return true;
  }
  if (!verdict.blocking_trail) return false;
  const Trail& t = *verdict.blocking_trail;
  if (t.empty() || !is_trail(net, t) || to_set(t).intersects(a)) return false;
  switch (verdict.notion) {
    case Notion::trail:
      if (!c.start(t) || !c.end(t)) return false;
      if (verdict.prefix_option || verdict.suffix_option)
        return (verdict.prefix_option && c.all_prefix(t)) ||
               (verdict.suffix_option && c.all_suffix(t));
      return c.mixed(t);  // witness from the per-agent reading
    case Notion::full_trail: return c.start(t) && c.end(t) && c.all_pairs(t);
    case Notion::chain: return is_chain(net, t) && c.start(t) && c.end(t) && c.all_pairs(t);
    case Notion::strong_trail: return c.strong(t);
    default: return false;
  }
}

}  // namespace trailnet
