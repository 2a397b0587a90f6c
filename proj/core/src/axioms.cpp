#include "trailnet/axioms.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>

#include "trailnet/error.hpp"

namespace trailnet {

namespace {

using Mask = std::uint32_t;

int popcount(Mask m) { return std::popcount(m); }

// C^f tabulated over every subset of X_f, in local bit positions.
class LocalTable {
 public:
  LocalTable(const ChoiceFunction& cf, std::size_t guard, const std::string& axiom) {
    for (ContractIndex x : cf.own()) global_.push_back(x);
    if (global_.size() > guard)
      throw GuardExceeded(axiom + ": agent has " + std::to_string(global_.size()) +
                          " contracts; the exhaustive check is limited to " +
                          std::to_string(guard));
    for (std::size_t i = 0; i < global_.size(); ++i) {
      if (cf.upstream().contains(global_[i]))
        up_ |= Mask{1} << i;
      else
        down_ |= Mask{1} << i;
    }
    const std::size_t n = global_.size();
    table_.resize(std::size_t{1} << n);
    for (Mask m = 0; m < table_.size(); ++m) table_[m] = to_local(cf.choose(to_global(m)));
  }

  std::size_t size() const { return global_.size(); }
  Mask all() const { return up_ | down_; }
  Mask up() const { return up_; }
  Mask down() const { return down_; }
  Mask choose(Mask offered) const { return table_[offered]; }
  ContractIndex global(std::size_t bit) const { return global_[bit]; }

  ContractSet to_global(Mask m) const {
    ContractSet out;
    for (std::size_t i = 0; i < global_.size(); ++i)
      if (m >> i & 1U) out.insert(global_[i]);
    return out;
  }
  Mask to_local(ContractSet s) const {
    Mask out = 0;
    for (std::size_t i = 0; i < global_.size(); ++i)
      if (s.contains(global_[i])) out |= Mask{1} << i;
    return out;
  }

 private:
  std::vector<ContractIndex> global_;
  Mask up_ = 0, down_ = 0;
  std::vector<Mask> table_;
};

template <typename Fn>
void subsets(Mask mask, Fn&& fn) {
  Mask sub = 0;
  while (true) {
    fn(sub);
    if (sub == mask) break;
    sub = (sub - mask) & mask;
  }
}

// Calls fn(bit) for every set bit.
template <typename Fn>
void bits(Mask mask, Fn&& fn) {
  while (mask) {
    const int b = std::countr_zero(mask);
    fn(b);
    mask &= mask - 1;
  }
}

AxiomReport holds(const std::string& axiom, AgentIndex agent) {
  AxiomReport r;
  r.axiom = axiom;
  r.agent = agent;
  return r;
}

void fail(AxiomReport& r, AxiomWitness w) {
  r.holds = false;
  r.witness = std::move(w);
}

// Exception used to stop nested enumerations once a witness is found.
struct Found {};

}  // namespace

bool is_w_rational(const ChoiceFunction& cf, ContractSet a, ContractSet w) {
  return is_rational(cf, a, w);
}

bool is_rational_pair(const ChoiceFunction& cf, ContractIndex y, ContractIndex z, ContractSet w) {
  if (!cf.upstream().contains(y) || !cf.downstream().contains(z))
    throw InputError("a rational pair needs one upstream and one downstream contract of the agent");
  const ContractSet sy = ContractSet::single(y), sz = ContractSet::single(z);
  return !is_rational(cf, sy, w) && !is_rational(cf, sz, w) && is_rational(cf, sy | sz, w);
}

AxiomReport check_irc(const ChoiceFunction& cf) {
  AxiomReport r = holds("irc", cf.agent());
  LocalTable t(cf, kMaxAxiomContracts, r.axiom);
  // Removing one rejected contract at a time reaches every Z with
  // C(Y) ⊆ Z ⊆ Y, so single removals decide the axiom.
  try {
    subsets(t.all(), [&](Mask y) {
      const Mask c = t.choose(y);
      bits(y & ~c, [&](int b) {
        const Mask z = y & ~(Mask{1} << b);
        if (t.choose(z) != c) {
          fail(r, {{{"Y", t.to_global(y)}, {"Z", t.to_global(z)}}, t.global(b), ""});
          throw Found{};
        }
      });
    });
  } catch (const Found&) {
  }
  return r;
}

AxiomReport check_full_substitutability(const ChoiceFunction& cf) {
  AxiomReport r = holds("full_substitutability", cf.agent());
  LocalTable t(cf, kMaxAxiomContracts, r.axiom);
  // Each containment is transitive along single-contract steps, so checking
  // Y' = Y - {y} (resp. Z' = Z - {z}) covers all nested pairs.
  auto report = [&](const char* which, Mask y, Mask y2, Mask z, Mask z2, Mask offending) {
    fail(r, {{{"Y", t.to_global(y)},
              {"Y'", t.to_global(y2)},
              {"Z", t.to_global(z)},
              {"Z'", t.to_global(z2)}},
             t.global(static_cast<std::size_t>(std::countr_zero(offending))),
             which});
    throw Found{};
  };
  try {
    subsets(t.up(), [&](Mask y) {
      subsets(t.down(), [&](Mask z) {
        const Mask c = t.choose(y | z);
        const Mask rb = y & ~c, rs = z & ~c;
        bits(y, [&](int b) {
          const Mask y2 = y & ~(Mask{1} << b);
          const Mask c2 = t.choose(y2 | z);
          if (Mask bad = (y2 & ~c2) & ~rb) report("sss_upstream", y, y2, z, z, bad);
          if (Mask bad = rs & ~(z & ~c2)) report("csc_downstream", y, y2, z, z, bad);
        });
        bits(z, [&](int b) {
          const Mask z2 = z & ~(Mask{1} << b);
          const Mask c2 = t.choose(y | z2);
          if (Mask bad = (z2 & ~c2) & ~rs) report("sss_downstream", y, y, z, z2, bad);
          if (Mask bad = rb & ~(y & ~c2)) report("csc_upstream", y, y, z, z2, bad);
        });
      });
    });
  } catch (const Found&) {
  }
  return r;
}

AxiomReport check_lad_las(const ChoiceFunction& cf) {
  AxiomReport r = holds("lad_las", cf.agent());
  LocalTable t(cf, kMaxAxiomContracts, r.axiom);
  // Both laws say |C_B| - |C_S| is monotone in the offer on one side, which
  // single-contract steps decide.
  try {
    subsets(t.up(), [&](Mask y) {
      subsets(t.down(), [&](Mask z) {
        const Mask c = t.choose(y | z);
        const int cb = popcount(c & t.up()), cs = popcount(c & t.down());
        bits(y, [&](int b) {
          const Mask y2 = y & ~(Mask{1} << b);
          const Mask c2 = t.choose(y2 | z);
          if (cb - popcount(c2 & t.up()) < cs - popcount(c2 & t.down())) {
            fail(r, {{{"Y", t.to_global(y)}, {"Y'", t.to_global(y2)}, {"Z", t.to_global(z)}},
                     t.global(b),
                     "lad"});
            throw Found{};
          }
        });
        bits(z, [&](int b) {
          const Mask z2 = z & ~(Mask{1} << b);
          const Mask c2 = t.choose(y | z2);
          if (cs - popcount(c2 & t.down()) < cb - popcount(c2 & t.up())) {
            fail(r, {{{"Y", t.to_global(y)}, {"Z", t.to_global(z)}, {"Z'", t.to_global(z2)}},
                     t.global(b),
                     "las"});
            throw Found{};
          }
        });
      });
    });
  } catch (const Found&) {
  }
  return r;
}

AxiomReport check_separability(const ChoiceFunction& cf) {
  AxiomReport r = holds("separability", cf.agent());
  LocalTable t(cf, kMaxSeparabilityContracts, r.axiom);
  auto rational = [&](Mask a, Mask w) { return (a & ~t.choose(a | w)) == 0; };
  try {
    subsets(t.all(), [&](Mask w) {
      std::vector<std::pair<int, int>> pairs;
      bits(t.up(), [&](int yb) {
        bits(t.down(), [&](int zb) {
          const Mask y = Mask{1} << yb, z = Mask{1} << zb;
          if (!rational(y, w) && !rational(z, w) && rational(y | z, w)) pairs.emplace_back(yb, zb);
        });
      });
      if (pairs.empty()) return;
      subsets(t.all(), [&](Mask a) {
        if (!rational(a, w)) return;
        for (auto [yb, zb] : pairs) {
          const Mask yz = (Mask{1} << yb) | (Mask{1} << zb);
          if (a & yz) continue;
          if (!rational(a | yz, w)) {
            fail(r, {{{"W", t.to_global(w)}, {"A", t.to_global(a)}, {"pair", t.to_global(yz)}},
                     std::nullopt,
                     ""});
            throw Found{};
          }
        }
      });
    });
  } catch (const Found&) {
  }
  return r;
}

AxiomReport check_simplicity(const ChoiceFunction& cf, const std::vector<double>& intensity) {
  AxiomReport r = holds("simplicity", cf.agent());
  LocalTable t(cf, kMaxAxiomContracts, r.axiom);
  auto w = [&](int b) { return intensity.at(t.global(static_cast<std::size_t>(b))); };
  // Every set f keeps when offered alone is (W,f)-rational for W = ∅, and the
  // condition does not depend on W, so individually rational sets are the ones to scan.
  // Sets without downstream contracts are exempt: read literally they would bar
  // every buyer from signing anything it cannot resell.
  std::size_t exempt = 0;
  try {
    subsets(t.all(), [&](Mask a) {
      if (t.choose(a) != a) return;
      if ((a & t.down()) == 0) {
        exempt += (a & t.up()) != 0;
        return;
      }
      bits(a & t.up(), [&](int yb) {
        bool found = false;
        bits(a & t.down(), [&](int zb) { found = found || w(yb) > w(zb); });
        if (!found) {
          AxiomWitness wit{{{"A", t.to_global(a)}}, t.global(static_cast<std::size_t>(yb)), ""};
          wit.intensity = intensity;
          fail(r, std::move(wit));
          throw Found{};
        }
      });
    });
  } catch (const Found&) {
  }
  if (exempt > 0)
    r.notes.push_back(std::to_string(exempt) +
                      " individually rational set(s) with upstream contracts only were exempt");
  return r;
}

AxiomReport check_w_contraction(const ChoiceFunction& cf) {
  AxiomReport r = holds("w_contraction", cf.agent());
  LocalTable t(cf, kMaxAxiomContracts, r.axiom);
  const int n_down = popcount(t.down());
  // w((A,B) ⊎ (A',B')) = |A \ A'| - |X^S_f \ (B' \ B)|
  auto w_minus = [&](Mask a, Mask b, Mask a2, Mask b2) {
    return popcount(a & ~a2) - (n_down - popcount(b2 & ~b));
  };
  try {
    subsets(t.up(), [&](Mask y) {
      subsets(t.down(), [&](Mask z) {
        const Mask c = t.choose(y | z);
        const Mask rb = y & ~c, rs = z & ~c;
        subsets(y, [&](Mask y2) {
          subsets(t.down() & ~z, [&](Mask extra) {
            const Mask z2 = z | extra;  // (Y',Z') ⊑ (Y,Z)
            const Mask c2 = t.choose(y2 | z2);
            const Mask rb2 = y2 & ~c2, rs2 = z2 & ~c2;
            if (w_minus(rb, rs, rb2, rs2) > w_minus(y, z, y2, z2)) {
              fail(r, {{{"Y", t.to_global(y)},
                        {"Z", t.to_global(z)},
                        {"Y'", t.to_global(y2)},
                        {"Z'", t.to_global(z2)}},
                       std::nullopt,
                       ""});
              throw Found{};
            }
          });
        });
      });
    });
  } catch (const Found&) {
  }
  return r;
}

namespace {

struct PricedGrid {
  // Per trade label: contracts of the agent with that label, sorted by price.
  std::vector<std::vector<ContractIndex>> trades;
};

PricedGrid priced_grid(const ContractNetwork& net, ContractSet scope) {
  std::map<std::string, std::vector<ContractIndex>> by_label;
  for (ContractIndex x : scope) {
    const auto& c = net.contract(x);
    if (c.label && c.price) by_label[*c.label].push_back(x);
  }
  PricedGrid g;
  for (auto& [label, xs] : by_label) {
    std::sort(xs.begin(), xs.end(), [&](ContractIndex a, ContractIndex b) {
      return *net.contract(a).price < *net.contract(b).price;
    });
    g.trades.push_back(std::move(xs));
  }
  return g;
}

void check_scope(ContractSet scope, const std::string& axiom) {
  if (scope.size() > kMaxAxiomContracts)
    throw GuardExceeded(axiom + ": " + std::to_string(scope.size()) +
                        " contracts exceed the exhaustive limit of " +
                        std::to_string(kMaxAxiomContracts));
}

}  // namespace

AxiomReport check_feasibility(const Market& market, AgentIndex f) {
  AxiomReport r = holds("feasibility", f);
  const auto& cf = market.cf(f);
  LocalTable t(cf, kMaxAxiomContracts, r.axiom);
  const auto& net = market.network();
  try {
    subsets(t.all(), [&](Mask y) {
      const ContractSet chosen = t.to_global(t.choose(y));
      std::map<std::string, ContractIndex> seen;
      for (ContractIndex x : chosen) {
        const auto& c = net.contract(x);
        if (!c.label || !c.price) continue;
        auto [it, fresh] = seen.emplace(*c.label, x);
        if (!fresh) {
          fail(r, {{{"Y", t.to_global(y)}, {"chosen", chosen}}, x, "two prices for one trade"});
          throw Found{};
        }
      }
    });
  } catch (const Found&) {
  }
  return r;
}

AxiomReport check_cp(const Market& market, AgentIndex f) {
  AxiomReport r = holds("cp", f);
  const auto& net = market.network();
  const auto& cf = market.cf(f);
  check_scope(cf.own(), r.axiom);
  const PricedGrid grid = priced_grid(net, cf.own());

  for (const auto& prices : grid.trades) {
    const bool buying = cf.upstream().contains(prices.front());
    // CP1 (buyer) / CP2 (seller): some price is kept against every other offer.
    bool some_price_always_kept = false;
    for (ContractIndex x : prices) {
      bool always = true;
      const ContractSet rest = cf.own() - ContractSet::single(x);
      for_each_subset(rest, [&](ContractSet y) {
        if (always && !cf.choose(y | ContractSet::single(x)).contains(x)) always = false;
      });
      if (always) {
        some_price_always_kept = true;
        break;
      }
    }
    if (!some_price_always_kept) {
      ContractSet trade;
      for (ContractIndex x : prices) trade.insert(x);
      fail(r, {{{"trade", trade}}, prices.front(), buying ? "cp1" : "cp2"});
      return r;
    }
  }

  // CP3 for every trade f takes part in, with both parties' contracts as context.
  for (const auto& prices : grid.trades) {
    const AgentIndex s = net.seller(prices.front()), b = net.buyer(prices.front());
    const auto& cs = market.cf(s);
    const auto& cb = market.cf(b);
    ContractSet trade;
    for (ContractIndex x : prices) trade.insert(x);
    const ContractSet context = (cs.own() | cb.own()) - trade;
    check_scope(context, r.axiom);
    auto rejected_by = [&](const ChoiceFunction& who, ContractIndex x, ContractSet y) {
      return !who.choose(y | ContractSet::single(x)).contains(x);
    };
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) {
      const ContractIndex lo = prices[i], hi = prices[i + 1];
      if (*net.contract(hi).price != *net.contract(lo).price + 1) continue;
      bool ok = true;
      ContractSet bad_context;
      for_each_subset(context, [&](ContractSet y) {
        if (!ok) return;
        if (!rejected_by(cs, lo, y) || !rejected_by(cb, hi, y)) return;
        const bool lo_both = rejected_by(cb, lo, y);  // seller already rejects lo
        const bool hi_both = rejected_by(cs, hi, y);  // buyer already rejects hi
        if (!lo_both && !hi_both) {
          ok = false;
          bad_context = y;
        }
      });
      if (!ok) {
        fail(r, {{{"trade", trade}, {"Y", bad_context}}, lo, "cp3"});
        return r;
      }
    }
  }
  return r;
}

AxiomReport check_pm(const Market& market, AgentIndex f) {
  AxiomReport r = holds("pm", f);
  const auto& net = market.network();
  const auto& cf = market.cf(f);
  check_scope(cf.own(), r.axiom);
  const PricedGrid grid = priced_grid(net, cf.own());
  for (const auto& prices : grid.trades) {
    const bool buying = cf.upstream().contains(prices.front());
    for (std::size_t i = 0; i < prices.size(); ++i) {
      for (std::size_t j = i + 1; j < prices.size(); ++j) {
        const ContractIndex cheap = prices[i], dear = prices[j];
        const ContractSet both = ContractSet::single(cheap) | ContractSet::single(dear);
        const ContractIndex loser = buying ? dear : cheap;
        std::optional<ContractSet> bad;
        for_each_subset(cf.own() - both, [&](ContractSet a) {
          if (!bad && cf.choose(a | both).contains(loser)) bad = a;
        });
        if (bad) {
          fail(r, {{{"A", *bad}, {"pair", both}}, loser, buying ? "buyer" : "seller"});
          return r;
        }
      }
    }
  }
  return r;
}

std::optional<std::vector<double>> find_intensity(const Market& market, AgentIndex f) {
  const auto& net = market.network();
  const auto& cf = market.cf(f);
  std::vector<double> intensity(net.contract_count(), 0.0);
  if (const auto& spec = market.spec(f)) {
    if (const auto* simple = std::get_if<SimpleIntensitySpec>(&*spec)) {
      for (const auto& [id, value] : simple->intensity) intensity[net.contract_index(id)] = value;
      return intensity;
    }
  }
  LocalTable t(cf, kMaxAxiomContracts, "simplicity");
  // Simplicity of one individually rational A only needs
  // min_{y ∈ A^B} w(y) > min_{z ∈ A^S} w(z).
  std::vector<Mask> constrained;
  subsets(t.all(), [&](Mask a) {
    if ((a & t.up()) && (a & t.down()) && t.choose(a) == a) constrained.push_back(a);
  });
  if (constrained.empty()) return intensity;
  if (t.size() > 8) return std::nullopt;
  std::vector<int> rank(t.size());
  std::iota(rank.begin(), rank.end(), 0);
  do {
    bool ok = true;
    for (Mask a : constrained) {
      int min_up = 1 << 30, min_down = 1 << 30;
      bits(a & t.up(), [&](int b) { min_up = std::min(min_up, rank[b]); });
      bits(a & t.down(), [&](int b) { min_down = std::min(min_down, rank[b]); });
      if (min_up <= min_down) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (std::size_t i = 0; i < t.size(); ++i) intensity[t.global(i)] = rank[i];
      return intensity;
    }
  } while (std::next_permutation(rank.begin(), rank.end()));
  return std::nullopt;
}

const std::vector<std::string>& axiom_names() {
  static const std::vector<std::string> names = {"irc",          "full_substitutability",
                                                 "lad_las",      "separability",
                                                 "simplicity",   "w_contraction",
                                                 "feasibility",  "cp",
                                                 "pm"};
  return names;
}

AxiomReport run_axiom(const Market& market, AgentIndex f, const std::string& axiom) {
  const auto& cf = market.cf(f);
  if (axiom == "irc") return check_irc(cf);
  if (axiom == "full_substitutability") return check_full_substitutability(cf);
  if (axiom == "lad_las") return check_lad_las(cf);
  if (axiom == "separability") return check_separability(cf);
  if (axiom == "w_contraction") return check_w_contraction(cf);
  if (axiom == "feasibility") return check_feasibility(market, f);
  if (axiom == "cp") return check_cp(market, f);
  if (axiom == "pm") return check_pm(market, f);
  if (axiom == "simplicity") {
    if (auto w = find_intensity(market, f)) return check_simplicity(cf, *w);
    AxiomReport r = holds("simplicity", f);
    r.holds = false;
    r.notes.push_back("no intensity makes this choice function simple");
    return r;
  }
  throw InputError("unknown axiom '" + axiom + "'");
}

std::optional<AxiomReport> first_failure(const Market& market,
                                         const std::vector<std::string>& axioms) {
  for (const auto& axiom : axioms) {
    for (AgentIndex f = 0; f < market.network().agent_count(); ++f) {
      AxiomReport r = run_axiom(market, f, axiom);
      if (!r.holds) return r;
    }
  }
  return std::nullopt;
}

bool witness_reproduces(const Market& market, const AxiomReport& report) {
  if (report.holds || !report.witness) return false;
  const auto& w = *report.witness;
  const auto& cf = market.cf(report.agent);
  auto set = [&](const char* name) { return w.sets.at(name); };
  auto rb = [&](ContractSet y, ContractSet z) { return cf.rejected_upstream(y, z); };
  auto rs = [&](ContractSet z, ContractSet y) { return cf.rejected_downstream(z, y); };
  auto cb = [&](ContractSet y, ContractSet z) { return cf.chosen_upstream(y, z).size(); };
  auto cs = [&](ContractSet z, ContractSet y) { return cf.chosen_downstream(z, y).size(); };
  const std::string& a = report.axiom;

  if (a == "irc") {
    const ContractSet y = set("Y"), z = set("Z");
    const ContractSet c = cf.choose(y);
    return c.subset_of(z) && z.subset_of(y) && cf.choose(z) != c;
  }
  if (a == "full_substitutability") {
    const ContractSet y = set("Y"), y2 = set("Y'"), z = set("Z"), z2 = set("Z'");
    if (!y2.subset_of(y) || !z2.subset_of(z)) return false;
    if (w.detail == "sss_upstream") return !rb(y2, z).subset_of(rb(y, z));
    if (w.detail == "sss_downstream") return !rs(z2, y).subset_of(rs(z, y));
    if (w.detail == "csc_upstream") return !rb(y, z).subset_of(rb(y, z2));
    if (w.detail == "csc_downstream") return !rs(z, y).subset_of(rs(z, y2));
    return false;
  }
  if (a == "lad_las") {
    if (w.detail == "lad") {
      const ContractSet y = set("Y"), y2 = set("Y'"), z = set("Z");
      return y2.subset_of(y) && static_cast<long>(cb(y, z)) - static_cast<long>(cb(y2, z)) <
                                    static_cast<long>(cs(z, y)) - static_cast<long>(cs(z, y2));
    }
    const ContractSet y = set("Y"), z = set("Z"), z2 = set("Z'");
    return z2.subset_of(z) && static_cast<long>(cs(z, y)) - static_cast<long>(cs(z2, y)) <
                                  static_cast<long>(cb(y, z)) - static_cast<long>(cb(y, z2));
  }
  if (a == "separability") {
    const ContractSet ws = set("W"), as = set("A"), pair = set("pair");
    ContractIndex y = 0, z = 0;
    for (ContractIndex x : pair) (cf.upstream().contains(x) ? y : z) = x;
    return pair.size() == 2 && !as.intersects(pair) && is_w_rational(cf, as, ws) &&
           is_rational_pair(cf, y, z, ws) && !is_w_rational(cf, as | pair, ws);
  }
  if (a == "simplicity") {
    const ContractSet as = set("A");
    if (!w.contract || cf.choose(as) != as || !as.contains(*w.contract)) return false;
    for (ContractIndex z : as & cf.downstream())
      if (w.intensity.at(*w.contract) > w.intensity.at(z)) return false;
    return true;
  }
  if (a == "w_contraction") {
    const ContractSet y = set("Y"), z = set("Z"), y2 = set("Y'"), z2 = set("Z'");
    if (!y2.subset_of(y) || !z.subset_of(z2)) return false;
    const long n_down = static_cast<long>(cf.downstream().size());
    auto w_minus = [&](ContractSet p, ContractSet q, ContractSet p2, ContractSet q2) {
      return static_cast<long>((p - p2).size()) - (n_down - static_cast<long>((q2 - q).size()));
    };
    return w_minus(rb(y, z), rs(z, y), rb(y2, z2), rs(z2, y2)) > w_minus(y, z, y2, z2);
  }
  const auto& net = market.network();
  if (a == "feasibility") {
    const ContractSet chosen = cf.choose(set("Y"));
    std::map<std::string, int> count;
    for (ContractIndex x : chosen)
      if (net.contract(x).label && net.contract(x).price && ++count[*net.contract(x).label] > 1)
        return true;
    return false;
  }
  if (a == "pm") {
    const ContractSet as = set("A"), pair = set("pair");
    return w.contract && cf.choose(as | pair).contains(*w.contract);
  }
  if (a == "cp") {
    const ContractSet trade = set("trade");
    if (w.detail == "cp1" || w.detail == "cp2") {
      for (ContractIndex x : trade) {
        bool always = true;
        for_each_subset(cf.own() - ContractSet::single(x), [&](ContractSet y) {
          if (always && !cf.choose(y | ContractSet::single(x)).contains(x)) always = false;
        });
        if (always) return false;
      }
      return true;
    }
    if (w.detail == "cp3" && w.contract) {
      const ContractIndex lo = *w.contract;
      std::optional<ContractIndex> hi;
      for (ContractIndex x : trade)
        if (*net.contract(x).price == *net.contract(lo).price + 1) hi = x;
      if (!hi) return false;
      const ContractSet y = set("Y");
      const auto& cs_ = market.cf(net.seller(lo));
      const auto& cb_ = market.cf(net.buyer(lo));
      auto rejected_by = [&](const ChoiceFunction& who, ContractIndex x) {
        return !who.choose(y | ContractSet::single(x)).contains(x);
      };
      return rejected_by(cs_, lo) && rejected_by(cb_, *hi) &&
             !(rejected_by(cb_, lo) && rejected_by(cs_, lo)) &&
             !(rejected_by(cb_, *hi) && rejected_by(cs_, *hi));
    }
  }
  return false;
}

}  // namespace trailnet
