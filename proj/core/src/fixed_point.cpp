#include "trailnet/fixed_point.hpp"

#include <algorithm>
#include <deque>

#include "trailnet/axioms.hpp"
#include "trailnet/error.hpp"
#include "trailnet/parallel.hpp"
#include "trailnet/stability.hpp"

namespace trailnet {

OfferPair phi(const Market& market, const OfferPair& p) {
  const ContractSet all = market.network().all();
  const auto r = market.rejections(p.buyer_side, p.seller_side);
  return {all - r.downstream, all - r.upstream};
}

FixedPointResult iterate(const Market& market, const OfferPair& start, bool keep_trace) {
  FixedPointResult out;
  out.pair = start;
  if (keep_trace) out.trace.push_back(start);
  OfferPair next = phi(market, start);
  if (next == start) {
    out.outcome = start.outcome();
    return out;
  }
  const bool ascending = precedes(start, next);
  if (!ascending && !precedes(next, start))
    throw DomainError("start pair is not comparable with its image under the operator");

  const std::size_t cap = 2 * market.network().contract_count() + 2;
  OfferPair cur = start;
  while (!(next == cur)) {
    if (out.iterations >= cap)
      throw AxiomViolation("no fixed point within " + std::to_string(cap) +
                           " steps; choice functions are not isotone");
    if (ascending ? !precedes(cur, next) : !precedes(next, cur))
      throw AxiomViolation("iteration step against the initial direction; choice functions are not isotone");
    cur = next;
    ++out.iterations;
    if (keep_trace) out.trace.push_back(cur);
    next = phi(market, cur);
  }
  out.pair = cur;
  out.outcome = cur.outcome();
  return out;
}

FixedPointResult buyer_optimal(const Market& market, bool keep_trace) {
  return iterate(market, lattice_top(market.network()), keep_trace);
}

FixedPointResult seller_optimal(const Market& market, bool keep_trace) {
  return iterate(market, lattice_bottom(market.network()), keep_trace);
}

std::vector<OfferPair> enumerate_fixed_points(const Market& market, unsigned jobs) {
  const std::size_t n = market.network().contract_count();
  if (n > kMaxEnumerationContracts)
    throw GuardExceeded("fixed-point enumeration is limited to " +
                        std::to_string(kMaxEnumerationContracts) + " contracts, got " +
                        std::to_string(n));
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;

  // Every fixed point has buyer_side ∪ seller_side = X, so each contract is
  // on the buyer side only, the seller side only, or both.
  const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(jobs, total));
  std::vector<std::vector<OfferPair>> found(blocks);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t begin = total * b / blocks, end = total * (b + 1) / blocks;
    for (std::size_t code = begin; code < end; ++code) {
      OfferPair p;
      std::size_t rest = code;
      for (std::size_t i = 0; i < n; ++i, rest /= 3) {
        const std::size_t digit = rest % 3;
        if (digit != 1) p.buyer_side.insert(i);
        if (digit != 0) p.seller_side.insert(i);
      }
      if (phi(market, p) == p) found[b].push_back(p);
    }
  });
  std::vector<OfferPair> out;
  for (auto& v : found) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end(), pair_less);
  return out;
}

std::vector<ContractSet> fixed_point_outcomes(const std::vector<OfferPair>& points) {
  std::vector<ContractSet> out;
  for (const auto& p : points) out.push_back(p.outcome());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

OfferPair canonical_pair(const Market& market, ContractSet a) {
  const auto verdict = check_stability(market, a, Notion::full_trail);
  if (!verdict.stable) throw DomainError("outcome is not fully trail-stable");

  const auto& net = market.network();
  // X0^B: contracts outside A reachable by a locally blocking-style walk. A
  // walk with a repeated contract shortens to a trail with the same ends, so
  // plain reachability suffices.
  ContractSet reached;
  std::deque<ContractIndex> queue;
  for (ContractIndex x : net.all() - a) {
    if (is_rational(market.cf(net.seller(x)), ContractSet::single(x), a)) {
      reached.insert(x);
      queue.push_back(x);
    }
  }
  while (!queue.empty()) {
    const ContractIndex x = queue.front();
    queue.pop_front();
    const AgentIndex f = net.buyer(x);
    for (ContractIndex next : net.downstream(f) - a - reached) {
      if (is_rational(market.cf(f), ContractSet::single(x) | ContractSet::single(next), a)) {
        reached.insert(next);
        queue.push_back(next);
      }
    }
  }
  const OfferPair pair{a | reached, net.all() - reached};
  if (!(phi(market, pair) == pair))
    throw AxiomViolation("canonical pair is not a fixed point; choice functions violate the axioms");
  return pair;
}

const char* superiority_name(Superiority s) {
  switch (s) {
    case Superiority::equal: return "equal";
    case Superiority::seller_superior: return "seller_superior";
    case Superiority::buyer_superior: return "buyer_superior";
    case Superiority::incomparable: return "incomparable";
  }
  return "incomparable";
}

Superiority compare_terminal_superiority(const Market& market, ContractSet a, ContractSet w) {
  const auto& net = market.network();
  const auto part = terminal_partition(net);
  auto check_ir = [&](AgentIndex f) {
    const auto& cf = market.cf(f);
    for (ContractSet s : {a, w}) {
      const ContractSet mine = s & cf.own();
      if (cf.choose(mine) != mine)
        throw DomainError("outcome is not individually rational for terminal agent '" +
                          net.agents()[f] + "'");
    }
  };
  for (AgentIndex f : part.terminal_sellers) check_ir(f);
  for (AgentIndex f : part.terminal_buyers) check_ir(f);

  if (terminal_contracts(net, a) == terminal_contracts(net, w)) return Superiority::equal;

  auto keeps = [&](AgentIndex f, ContractSet kept) {
    const auto& cf = market.cf(f);
    return cf.choose((a | w) & cf.own()) == (kept & cf.own());
  };
  auto superior = [&](ContractSet for_sellers, ContractSet for_buyers) {
    for (AgentIndex f : part.terminal_sellers)
      if (!keeps(f, for_sellers)) return false;
    for (AgentIndex f : part.terminal_buyers)
      if (!keeps(f, for_buyers)) return false;
    return true;
  };
  if (superior(a, w)) return Superiority::seller_superior;
  if (superior(w, a)) return Superiority::buyer_superior;
  return Superiority::incomparable;
}

TerminalLattice terminal_lattice(const Market& market, unsigned jobs) {
  if (auto bad = first_failure(market, {"full_substitutability", "lad_las"}))
    throw AxiomViolation("terminal lattice needs full substitutability and LAD/LAS; agent '" +
                         market.network().agents()[bad->agent] + "' fails " + bad->axiom);
  const auto& net = market.network();
  const ContractSet t = terminal_contracts(net, net.all());
  auto project = [&](const OfferPair& p) {
    return OfferPair{p.buyer_side & t, p.seller_side & t};
  };

  const auto points = enumerate_fixed_points(market, jobs);
  TerminalLattice out;
  for (const auto& p : points) out.elements.push_back(project(p));
  std::sort(out.elements.begin(), out.elements.end(), pair_less);
  out.elements.erase(std::unique(out.elements.begin(), out.elements.end()), out.elements.end());

  // Canonical inverse image: join of all fixed points whose projection lies below.
  for (const auto& e : out.elements) {
    std::optional<OfferPair> image;
    for (const auto& p : points)
      if (precedes(project(p), e)) image = image ? lattice_join(*image, p) : p;
    if (!(project(*image) == e))
      throw DomainError("canonical inverse image does not project back to its element");
    out.canonical_images.push_back(*image);
  }

  auto index_of = [&](const OfferPair& e) -> std::size_t {
    const auto it = std::lower_bound(out.elements.begin(), out.elements.end(), e, pair_less);
    if (it == out.elements.end() || !(*it == e))
      throw DomainError("terminal join or meet falls outside the projected fixed points");
    return static_cast<std::size_t>(it - out.elements.begin());
  };
  const std::size_t k = out.elements.size();
  out.join.assign(k, std::vector<std::size_t>(k));
  out.meet.assign(k, std::vector<std::size_t>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& ei = out.elements[i];
      const auto& ej = out.elements[j];
      const std::size_t jn = index_of(project(lattice_join(out.canonical_images[i], out.canonical_images[j])));
      const std::size_t mt = index_of(project(lattice_meet(out.canonical_images[i], out.canonical_images[j])));
      const auto& join = out.elements[jn];
      const auto& meet = out.elements[mt];
      if (!precedes(ei, join) || !precedes(ej, join) || !precedes(meet, ei) || !precedes(meet, ej))
        throw DomainError("terminal join or meet is not a bound");
      for (const auto& e : out.elements) {
        if (precedes(ei, e) && precedes(ej, e) && !precedes(join, e))
          throw DomainError("terminal join is not the least upper bound");
        if (precedes(e, ei) && precedes(e, ej) && !precedes(e, meet))
          throw DomainError("terminal meet is not the greatest lower bound");
      }
      out.join[i][j] = jn;
      out.meet[i][j] = mt;
    }
  }
  return out;
}

}  // namespace trailnet
