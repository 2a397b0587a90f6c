#include <gtest/gtest.h>

#include "support.hpp"
#include "trailnet/dynamics.hpp"
#include "trailnet/error.hpp"
#include "trailnet/oracle.hpp"

using namespace trailnet;

namespace {

// s sells to b; the entrant s2 offers b a second contract that b prefers.
Market base() {
  auto net = validate_network({{"s", "b"}, {{"x", "s", "b", {}, {}}}});
  return Market::from_specs(std::move(net), {UnitDemandSpec{{"x"}}, UnitDemandSpec{{"x"}}});
}

EntryEvent seller_entry() {
  EntryEvent e;
  e.new_agent = "s2";
  e.side = EntrySide::terminal_seller;
  e.contracts = {{"x2", "s2", "b", {}, {}}};
  e.choice = UnitDemandSpec{{"x2"}};
  e.updated_choices = {{"b", UnitDemandSpec{{"x2", "x"}}}};
  return e;
}

}  // namespace

TEST(Dynamics, EntryAppendsAgentAndContracts) {
  const Market m = base();
  const Surgery s = apply_entry(m, seller_entry());
  EXPECT_EQ(s.market.network().agent_count(), 3u);
  EXPECT_EQ(s.market.network().contract_count(), 2u);
  EXPECT_EQ(s.to_old, (std::vector<std::optional<ContractIndex>>{0, std::nullopt}));
  EXPECT_EQ(s.agent_to_old[2], std::nullopt);
  EXPECT_EQ(s.market.cf(1).choose(s.market.network().all()),
            s.market.network().to_set({"x2"}));
}

TEST(Dynamics, EntryErrors) {
  const Market m = base();
  auto e = seller_entry();
  e.new_agent = "s";
  EXPECT_THROW(apply_entry(m, e), InputError);
  e = seller_entry();
  e.contracts = {{"x2", "b", "s2", {}, {}}};  // wrong side
  EXPECT_THROW(apply_entry(m, e), InputError);
  e = seller_entry();
  e.contracts = {{"x2", "s2", "ghost", {}, {}}};
  EXPECT_THROW(apply_entry(m, e), InputError);
  e = seller_entry();
  e.updated_choices = {{"ghost", UnitDemandSpec{}}};
  EXPECT_THROW(apply_entry(m, e), InputError);
  e = seller_entry();
  e.updated_choices = {{"b", UnitDemandSpec{{"x2"}}}};  // drops x on old offers
  EXPECT_THROW(apply_entry(m, e), InputError);
}

TEST(Dynamics, SellerEntryHurtsIncumbentSeller) {
  const Market m = base();
  const auto r = entry_comparative_statics(m, seller_entry());
  EXPECT_TRUE(r.preconditions_met);
  EXPECT_TRUE(r.all_hold);
  EXPECT_EQ(r.before_max, m.network().to_set({"x"}));
  ASSERT_EQ(r.after_max.size(), 1u);
  EXPECT_FALSE(r.checks.empty());
}

TEST(Dynamics, IsolatedEntrantChangesNothing) {
  const Market m = base();
  EntryEvent e;
  e.new_agent = "hermit";
  e.choice = UnitDemandSpec{};
  const auto r = entry_comparative_statics(m, e);
  EXPECT_TRUE(r.all_hold);
  EXPECT_EQ(r.before_max, r.after_max);
  EXPECT_EQ(r.before_min, r.after_min);
}

TEST(Dynamics, ExitOfTerminalAgent) {
  const Market m = apply_entry(base(), seller_entry()).market;
  const Surgery s = apply_exit(m, "s2");
  EXPECT_EQ(s.market.network().agents(), (std::vector<AgentId>{"s", "b"}));
  EXPECT_EQ(s.market.network().contract_count(), 1u);
  EXPECT_THROW(apply_exit(m, "ghost"), InputError);
  const auto r = exit_comparative_statics(m, "s2");
  EXPECT_TRUE(r.all_hold);
}

TEST(Dynamics, NonTerminalExitIsRejected) {
  const Market m = test::load("example1");
  EXPECT_THROW(apply_exit(m, "j"), InputError);
}

TEST(Dynamics, ReadjustmentFromEveryOutcome) {
  const Market m = base();
  const auto r = market_readjustment(m, m.network().to_set({"x"}), seller_entry());
  EXPECT_TRUE(r.all_hold);
  EXPECT_EQ(r.after, r.result.outcome);
  EXPECT_THROW(market_readjustment(m, {}, seller_entry(), OfferPair{{}, {}}), InputError);
}

TEST(Dynamics, GeneratedScenariosSatisfyStatics) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto sc = generate_entry_scenario(seed);
    const auto r = entry_comparative_statics(sc.base.market, sc.event);
    EXPECT_TRUE(r.preconditions_met) << "seed " << seed;
    EXPECT_TRUE(r.all_hold) << "seed " << seed;
    // Reversing the entry is an exit of the same agent.
    const Market after = apply_entry(sc.base.market, sc.event).market;
    const auto back = exit_comparative_statics(after, sc.event.new_agent);
    EXPECT_TRUE(back.all_hold) << "seed " << seed;
  }
}

TEST(Dynamics, RuralHospitalsOnLatticeCorpus) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = generate_instance(seed, "ladlas");
    const auto r = rural_hospitals_check(inst.market);
    EXPECT_TRUE(r.preconditions_met);
    EXPECT_TRUE(r.invariant) << "seed " << seed;
    EXPECT_FALSE(r.outcomes.empty());
    EXPECT_EQ(r.balance.size(), inst.market.network().agent_count());
  }
}

TEST(Dynamics, RuralHospitalsReportsUnmetPreconditions) {
  // The middle agent only wants u1, u2 and d together.
  auto net = validate_network({{"a", "b", "c"},
                               {{"u1", "a", "b", {}, {}},
                                {"u2", "a", "b", {}, {}},
                                {"d", "b", "c", {}, {}}}});
  const Market m = Market::from_specs(
      std::move(net), {ResponsiveSpec{{}, {"u1", "u2"}, 0, 2}, PreferenceListSpec{{{"u1", "u2", "d"}}},
                       UnitDemandSpec{{"d"}}});
  const auto r = rural_hospitals_check(m);
  EXPECT_FALSE(r.preconditions_met);
  EXPECT_FALSE(r.unmet.empty());
}
