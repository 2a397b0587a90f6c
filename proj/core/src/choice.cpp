#include "trailnet/choice.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "trailnet/error.hpp"

namespace trailnet {

namespace {

struct FamilyNameVisitor {
  std::string operator()(const PreferenceListSpec&) const { return "preference_list"; }
  std::string operator()(const SeparableIntensitySpec&) const { return "separable_intensity"; }
  std::string operator()(const SimpleIntensitySpec&) const { return "simple_intensity"; }
  std::string operator()(const UnitDemandSpec&) const { return "unit_demand"; }
  std::string operator()(const ResponsiveSpec&) const { return "responsive"; }
  std::string operator()(const PartitionFSpec&) const { return "partition_f"; }
  std::string operator()(const PartitionGSpec&) const { return "partition_g"; }
  std::string operator()(const NeedleFSpec&) const { return "needle_f"; }
  std::string operator()(const TableSpec&) const { return "table"; }
  std::string operator()(const ReservationSpec&) const { return "reservation"; }
};

// Resolves ids belonging to one agent, reporting family context on failure.
class Resolver {
 public:
  Resolver(const ContractNetwork& net, AgentIndex agent, std::string family)
      : net_(net), agent_(agent), family_(std::move(family)) {}

  ContractIndex one(const ContractId& id, ContractSet allowed) const {
    auto x = net_.find_contract(id);
    if (!x) fail("unknown contract '" + id + "'");
    if (!allowed.contains(*x)) {
      fail("contract '" + id + "' is not " +
           (net_.contracts_of(agent_).contains(*x) ? std::string("on the required side for")
                                                   : std::string("a contract of")) +
           " agent '" + net_.agents()[agent_] + "'");
    }
    return *x;
  }

  std::vector<ContractIndex> list(const std::vector<ContractId>& ids, ContractSet allowed) const {
    std::vector<ContractIndex> out;
    ContractSet seen;
    for (const auto& id : ids) {
      ContractIndex x = one(id, allowed);
      if (seen.contains(x)) fail("contract '" + id + "' listed twice");
      seen.insert(x);
      out.push_back(x);
    }
    return out;
  }

  ContractSet set(const std::vector<ContractId>& ids, ContractSet allowed) const {
    ContractSet out;
    for (ContractIndex x : list(ids, allowed)) out.insert(x);
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(family_ + " choice for agent '" + net_.agents()[agent_] + "': " + msg);
  }

 private:
  const ContractNetwork& net_;
  AgentIndex agent_;
  std::string family_;
};

class PreferenceListRule final : public ChoiceRule {
 public:
  explicit PreferenceListRule(std::vector<ContractSet> ranking) : ranking_(std::move(ranking)) {}
  ContractSet choose(ContractSet offered) const override {
    for (ContractSet s : ranking_)
      if (s.subset_of(offered)) return s;
    return {};
  }

 private:
  std::vector<ContractSet> ranking_;
};

// Takes the first `count` members of `order` that are offered.
ContractSet take_best(const std::vector<ContractIndex>& order, ContractSet offered,
                      std::size_t count) {
  ContractSet out;
  for (ContractIndex x : order) {
    if (count == 0) break;
    if (offered.contains(x)) {
      out.insert(x);
      --count;
    }
  }
  return out;
}

class SeparableIntensityRule final : public ChoiceRule {
 public:
  SeparableIntensityRule(std::vector<ContractIndex> up, std::vector<ContractIndex> down)
      : up_(std::move(up)), down_(std::move(down)) {
    for (auto x : up_) up_mask_.insert(x);
    for (auto x : down_) down_mask_.insert(x);
  }
  ContractSet choose(ContractSet offered) const override {
    const std::size_t z = std::min((offered & up_mask_).size(), (offered & down_mask_).size());
    return take_best(up_, offered, z) | take_best(down_, offered, z);
  }

 private:
  std::vector<ContractIndex> up_, down_;
  ContractSet up_mask_, down_mask_;
};

class SimpleIntensityRule final : public ChoiceRule {
 public:
  SimpleIntensityRule(std::vector<double> intensity, ContractSet up, ContractSet down)
      : intensity_(std::move(intensity)), up_(up), down_(down) {}
  ContractSet choose(ContractSet offered) const override {
    std::optional<ContractIndex> best_up, best_down;
    for (ContractIndex x : offered & up_)
      if (!best_up || intensity_[x] > intensity_[*best_up]) best_up = x;
    for (ContractIndex x : offered & down_)
      if (!best_down || intensity_[x] < intensity_[*best_down]) best_down = x;
    if (best_up && best_down && intensity_[*best_up] > intensity_[*best_down])
      return ContractSet::single(*best_up).insert(*best_down);
    return {};
  }

 private:
  std::vector<double> intensity_;  // indexed by global contract index
  ContractSet up_, down_;
};

class ResponsiveRule final : public ChoiceRule {
 public:
  ResponsiveRule(std::vector<ContractIndex> up, std::vector<ContractIndex> down, std::size_t qb,
                 std::size_t qs)
      : up_(std::move(up)), down_(std::move(down)), qb_(qb), qs_(qs) {}
  ContractSet choose(ContractSet offered) const override {
    return take_best(up_, offered, qb_) | take_best(down_, offered, qs_);
  }

 private:
  std::vector<ContractIndex> up_, down_;
  std::size_t qb_, qs_;
};

// Weighted sums are compared against s = total/2 as 2*sum vs total, so
// half-integral thresholds need no rounding.
class PartitionFRule final : public ChoiceRule {
 public:
  PartitionFRule(std::vector<long long> weights, std::vector<ContractIndex> xs, ContractIndex y)
      : weights_(std::move(weights)), xs_(std::move(xs)), y_(y) {
    for (long long a : weights_) total_ += a;
  }
  ContractSet choose(ContractSet offered) const override {
    ContractSet x_part;
    long long sum = 0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (offered.contains(xs_[i])) {
        x_part.insert(xs_[i]);
        sum += weights_[i];
      }
    }
    if (2 * sum >= total_) return x_part | (offered & ContractSet::single(y_));
    return x_part;
  }

 private:
  std::vector<long long> weights_;
  std::vector<ContractIndex> xs_;
  ContractIndex y_;
  long long total_ = 0;
};

class PartitionGRule final : public ChoiceRule {
 public:
  PartitionGRule(std::vector<long long> weights, std::vector<ContractIndex> xs, ContractIndex y)
      : weights_(std::move(weights)), xs_(std::move(xs)), y_(y) {
    for (long long a : weights_) total_ += a;
  }
  ContractSet choose(ContractSet offered) const override {
    if (!offered.contains(y_)) return {};
    ContractSet out = ContractSet::single(y_);
    // Keep x_i in index order while the running sum stays <= s; this is
    // X ∩ {x_1..x_t} for the t the case split singles out, and all of X when
    // the whole offer fits.
    long long sum = 0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      if (!offered.contains(xs_[i])) continue;
      if (2 * (sum + weights_[i]) > total_) break;
      sum += weights_[i];
      out.insert(xs_[i]);
    }
    return out;
  }

 private:
  std::vector<long long> weights_;
  std::vector<ContractIndex> xs_;
  ContractIndex y_;
  long long total_ = 0;
};

class NeedleFRule final : public ChoiceRule {
 public:
  NeedleFRule(std::size_t n, std::optional<ContractSet> hidden, ContractSet xs, ContractIndex y)
      : n_(n), hidden_(hidden), xs_(xs), y_(y) {}
  ContractSet choose(ContractSet offered) const override {
    const ContractSet x_part = offered & xs_;
    const bool accept_y = x_part.size() >= n_ + 1 || (hidden_ && x_part == *hidden_);
    if (accept_y) return x_part | (offered & ContractSet::single(y_));
    return x_part;
  }

 private:
  std::size_t n_;
  std::optional<ContractSet> hidden_;
  ContractSet xs_;
  ContractIndex y_;
};

class TableRule final : public ChoiceRule {
 public:
  explicit TableRule(std::unordered_map<std::uint64_t, ContractSet> table)
      : table_(std::move(table)) {}
  ContractSet choose(ContractSet offered) const override {
    auto it = table_.find(offered.bits());
    return it == table_.end() ? ContractSet{} : it->second;
  }

 private:
  std::unordered_map<std::uint64_t, ContractSet> table_;
};

class ReservationRule final : public ChoiceRule {
 public:
  struct TradeSide {
    std::string trade;
    long long reservation;
    std::vector<std::pair<long long, ContractIndex>> grid;  // ascending price
  };

  ReservationRule(std::vector<TradeSide> buys, std::vector<TradeSide> sells,
                  std::optional<std::size_t> qb, std::optional<std::size_t> qs)
      : buys_(std::move(buys)), sells_(std::move(sells)), qb_(qb), qs_(qs) {}

  ContractSet choose(ContractSet offered) const override {
    return pick(buys_, offered, qb_, true) | pick(sells_, offered, qs_, false);
  }

 private:
  static ContractSet pick(const std::vector<TradeSide>& sides, ContractSet offered,
                          std::optional<std::size_t> capacity, bool buying) {
    struct Candidate {
      long long margin;
      const std::string* trade;
      ContractIndex contract;
    };
    std::vector<Candidate> candidates;
    for (const auto& side : sides) {
      std::optional<std::pair<long long, ContractIndex>> best;
      for (const auto& entry : side.grid) {
        if (!offered.contains(entry.second)) continue;
        // Buyers want the cheapest offer, sellers the dearest.
        if (!best || (buying ? entry.first < best->first : entry.first > best->first))
          best = entry;
      }
      if (!best) continue;
      const long long margin = buying ? side.reservation - best->first
                                      : best->first - side.reservation;
      if (margin < 0) continue;
      candidates.push_back({margin, &side.trade, best->second});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.margin != b.margin) return a.margin > b.margin;
      return *a.trade < *b.trade;
    });
    ContractSet out;
    std::size_t limit = capacity.value_or(candidates.size());
    for (std::size_t i = 0; i < candidates.size() && i < limit; ++i)
      out.insert(candidates[i].contract);
    return out;
  }

  std::vector<TradeSide> buys_, sells_;
  std::optional<std::size_t> qb_, qs_;
};

class FunctionRule final : public ChoiceRule {
 public:
  explicit FunctionRule(std::function<ContractSet(ContractSet)> fn) : fn_(std::move(fn)) {}
  ContractSet choose(ContractSet offered) const override { return fn_(offered); }

 private:
  std::function<ContractSet(ContractSet)> fn_;
};

class CountingRule final : public ChoiceRule {
 public:
  CountingRule(ChoiceFunction inner, std::shared_ptr<std::atomic<std::size_t>> counter)
      : inner_(std::move(inner)), counter_(std::move(counter)) {}
  ContractSet choose(ContractSet offered) const override {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return inner_.choose(offered);
  }

 private:
  ChoiceFunction inner_;
  std::shared_ptr<std::atomic<std::size_t>> counter_;
};

class RemappedRule final : public ChoiceRule {
 public:
  RemappedRule(ChoiceFunction old, std::vector<std::optional<ContractIndex>> to_old)
      : old_(std::move(old)), to_old_(std::move(to_old)) {}
  ContractSet choose(ContractSet offered) const override {
    ContractSet old_offer;
    std::vector<ContractIndex> to_new(kMaxContracts, kMaxContracts);
    for (ContractIndex x : offered) {
      if (!to_old_[x]) continue;
      old_offer.insert(*to_old_[x]);
      to_new[*to_old_[x]] = x;
    }
    ContractSet out;
    for (ContractIndex x : old_.choose(old_offer)) out.insert(to_new[x]);
    return out;
  }

 private:
  ChoiceFunction old_;
  std::vector<std::optional<ContractIndex>> to_old_;
};

struct RuleBuilder {
  const ContractNetwork& net;
  AgentIndex agent;

  ContractSet up() const { return net.upstream(agent); }
  ContractSet down() const { return net.downstream(agent); }
  ContractSet own() const { return net.contracts_of(agent); }

  std::shared_ptr<const ChoiceRule> operator()(const PreferenceListSpec& s) const {
    Resolver r(net, agent, "preference_list");
    std::vector<ContractSet> ranking;
    std::set<std::uint64_t> seen;
    for (const auto& entry : s.ranking) {
      ContractSet set = r.set(entry, own());
      if (!seen.insert(set.bits()).second) r.fail("ranking lists the same subset twice");
      ranking.push_back(set);
    }
    return std::make_shared<PreferenceListRule>(std::move(ranking));
  }

  std::shared_ptr<const ChoiceRule> operator()(const SeparableIntensitySpec& s) const {
    Resolver r(net, agent, "separable_intensity");
    auto u = r.list(s.upstream_order, up());
    auto d = r.list(s.downstream_order, down());
    if (u.size() != up().size()) r.fail("upstream_order must cover every upstream contract");
    if (d.size() != down().size()) r.fail("downstream_order must cover every downstream contract");
    return std::make_shared<SeparableIntensityRule>(std::move(u), std::move(d));
  }

  std::shared_ptr<const ChoiceRule> operator()(const SimpleIntensitySpec& s) const {
    Resolver r(net, agent, "simple_intensity");
    std::vector<double> w(net.contract_count(), 0.0);
    ContractSet covered;
    std::set<double> values;
    for (const auto& [id, value] : s.intensity) {
      ContractIndex x = r.one(id, own());
      w[x] = value;
      covered.insert(x);
      if (!values.insert(value).second) r.fail("intensities must be pairwise distinct");
    }
    if (covered != own()) r.fail("intensity must be defined on every contract of the agent");
    return std::make_shared<SimpleIntensityRule>(std::move(w), up(), down());
  }

  std::shared_ptr<const ChoiceRule> operator()(const UnitDemandSpec& s) const {
    Resolver r(net, agent, "unit_demand");
    auto order = r.list(s.order, own());
    return std::make_shared<FunctionRule>(
        [order](ContractSet offered) { return take_best(order, offered, 1); });
  }

  std::shared_ptr<const ChoiceRule> operator()(const ResponsiveSpec& s) const {
    Resolver r(net, agent, "responsive");
    auto u = r.list(s.upstream, up());
    auto d = r.list(s.downstream, down());
    return std::make_shared<ResponsiveRule>(std::move(u), std::move(d), s.capacity_buy,
                                            s.capacity_sell);
  }

  template <typename Spec>
  void check_partition(const Spec& s, Resolver& r) const {
    if (s.weights.empty()) r.fail("needs at least one weight");
    if (s.weights.size() != s.x_contracts.size())
      r.fail("weights and x_contracts must have equal length");
    for (std::size_t i = 0; i < s.weights.size(); ++i) {
      if (s.weights[i] <= 0) r.fail("weights must be positive");
      if (i > 0 && s.weights[i] < s.weights[i - 1]) r.fail("weights must be sorted ascending");
    }
  }

  std::shared_ptr<const ChoiceRule> operator()(const PartitionFSpec& s) const {
    Resolver r(net, agent, "partition_f");
    check_partition(s, r);
    auto xs = r.list(s.x_contracts, up());
    ContractIndex y = r.one(s.y_contract, down());
    return std::make_shared<PartitionFRule>(s.weights, std::move(xs), y);
  }

  std::shared_ptr<const ChoiceRule> operator()(const PartitionGSpec& s) const {
    Resolver r(net, agent, "partition_g");
    check_partition(s, r);
    auto xs = r.list(s.x_contracts, down());
    ContractIndex y = r.one(s.y_contract, up());
    return std::make_shared<PartitionGRule>(s.weights, std::move(xs), y);
  }

  std::shared_ptr<const ChoiceRule> operator()(const NeedleFSpec& s) const {
    Resolver r(net, agent, "needle_f");
    if (s.n == 0) r.fail("n must be at least 1");
    if (s.x_contracts.size() != 2 * s.n) r.fail("needs exactly 2n x contracts");
    auto xs = r.list(s.x_contracts, up());
    ContractIndex y = r.one(s.y_contract, down());
    ContractSet x_mask;
    for (auto x : xs) x_mask.insert(x);
    std::optional<ContractSet> hidden;
    if (s.hidden) {
      if (s.hidden->size() != s.n) r.fail("hidden index set must have exactly n elements");
      ContractSet h;
      for (std::size_t i : *s.hidden) {
        if (i < 1 || i > 2 * s.n) r.fail("hidden index out of range 1..2n");
        if (h.contains(xs[i - 1])) r.fail("hidden index repeated");
        h.insert(xs[i - 1]);
      }
      hidden = h;
    }
    return std::make_shared<NeedleFRule>(s.n, hidden, x_mask, y);
  }

  std::shared_ptr<const ChoiceRule> operator()(const TableSpec& s) const {
    Resolver r(net, agent, "table");
    std::unordered_map<std::uint64_t, ContractSet> table;
    for (const auto& [offered_ids, chosen_ids] : s.entries) {
      ContractSet offered = r.set(offered_ids, own());
      ContractSet chosen = r.set(chosen_ids, own());
      if (!chosen.subset_of(offered)) r.fail("chosen set must be a subset of the offered set");
      if (!table.emplace(offered.bits(), chosen).second) r.fail("offered set listed twice");
    }
    return std::make_shared<TableRule>(std::move(table));
  }

  std::shared_ptr<const ChoiceRule> operator()(const ReservationSpec& s) const {
    Resolver r(net, agent, "reservation");
    auto collect = [&](const std::map<std::string, long long>& table, ContractSet side,
                       const char* what) {
      std::vector<ReservationRule::TradeSide> out;
      for (const auto& [trade, reservation] : table) {
        ReservationRule::TradeSide ts{trade, reservation, {}};
        for (ContractIndex x : side) {
          const auto& c = net.contract(x);
          if (c.label == trade && c.price) ts.grid.emplace_back(*c.price, x);
        }
        if (ts.grid.empty())
          r.fail(std::string("no priced ") + what + " contracts for trade '" + trade + "'");
        std::sort(ts.grid.begin(), ts.grid.end());
        out.push_back(std::move(ts));
      }
      return out;
    };
    return std::make_shared<ReservationRule>(collect(s.values, up(), "upstream"),
                                             collect(s.costs, down(), "downstream"),
                                             s.capacity_buy, s.capacity_sell);
  }
};

}  // namespace

std::string family_name(const ChoiceSpec& spec) { return std::visit(FamilyNameVisitor{}, spec); }

ChoiceFunction::ChoiceFunction(AgentIndex agent, ContractSet upstream, ContractSet downstream,
                               std::shared_ptr<const ChoiceRule> rule)
    : agent_(agent), upstream_(upstream), downstream_(downstream), rule_(std::move(rule)) {}

ContractSet ChoiceFunction::choose(ContractSet offered) const {
  const ContractSet mine = offered & own();
  const ContractSet chosen = rule_->choose(mine);
  if (!chosen.subset_of(mine))
    throw DomainError("choice function of agent #" + std::to_string(agent_) +
                      " chose contracts outside the offered set");
  return chosen;
}

ContractSet ChoiceFunction::chosen_upstream(ContractSet y, ContractSet z) const {
  return choose((y & upstream_) | (z & downstream_)) & upstream_;
}

ContractSet ChoiceFunction::chosen_downstream(ContractSet z, ContractSet y) const {
  return choose((z & downstream_) | (y & upstream_)) & downstream_;
}

ContractSet ChoiceFunction::rejected_upstream(ContractSet y, ContractSet z) const {
  return (y & upstream_) - chosen_upstream(y, z);
}

ContractSet ChoiceFunction::rejected_downstream(ContractSet z, ContractSet y) const {
  return (z & downstream_) - chosen_downstream(z, y);
}

ChoiceFunction build_choice(const ContractNetwork& net, AgentIndex agent, const ChoiceSpec& spec) {
  if (agent >= net.agent_count()) throw InputError("agent index out of range");
  auto rule = std::visit(RuleBuilder{net, agent}, spec);
  return ChoiceFunction(agent, net.upstream(agent), net.downstream(agent), std::move(rule));
}

ChoiceFunction make_choice(const ContractNetwork& net, AgentIndex agent,
                           std::function<ContractSet(ContractSet)> evaluator) {
  return ChoiceFunction(agent, net.upstream(agent), net.downstream(agent),
                        std::make_shared<FunctionRule>(std::move(evaluator)));
}

ChoiceFunction counting_choice(const ChoiceFunction& inner,
                               std::shared_ptr<std::atomic<std::size_t>> counter) {
  return ChoiceFunction(inner.agent(), inner.upstream(), inner.downstream(),
                        std::make_shared<CountingRule>(inner, std::move(counter)));
}

ChoiceFunction remap_choice(const ChoiceFunction& old, const ContractNetwork& net,
                            AgentIndex agent,
                            const std::vector<std::optional<ContractIndex>>& to_old) {
  if (to_old.size() != net.contract_count()) throw InputError("contract map has the wrong size");
  return ChoiceFunction(agent, net.upstream(agent), net.downstream(agent),
                        std::make_shared<RemappedRule>(old, to_old));
}

}  // namespace trailnet
