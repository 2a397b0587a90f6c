#include <gtest/gtest.h>

#include <memory>

#include "support.hpp"
#include "trailnet/error.hpp"
#include "trailnet/oracle.hpp"

using namespace trailnet;

namespace {

// Middle agent b buys u1,u2 from a and sells d1,d2 to c.
ContractNetwork middle() {
  return validate_network({{"a", "b", "c"},
                           {{"u1", "a", "b", {}, {}},
                            {"u2", "a", "b", {}, {}},
                            {"d1", "b", "c", {}, {}},
                            {"d2", "b", "c", {}, {}}}});
}

ContractSet s(const ContractNetwork& net, std::vector<ContractId> v) { return net.to_set(v); }

}  // namespace

TEST(Choice, PreferenceListPicksBestContainedBundle) {
  const auto net = middle();
  const AgentIndex b = net.agent_index("b");
  const auto cf = build_choice(net, b, PreferenceListSpec{{{"u1", "d1"}, {"u2", "d2"}, {"u2"}}});
  EXPECT_EQ(cf.choose(net.all()), s(net, {"u1", "d1"}));
  EXPECT_EQ(cf.choose(s(net, {"u2", "d1", "d2"})), s(net, {"u2", "d2"}));
  EXPECT_EQ(cf.choose(s(net, {"u2", "d1"})), s(net, {"u2"}));
  EXPECT_EQ(cf.choose(s(net, {"u1"})), ContractSet{});
}

TEST(Choice, SeparableIntensityMatchesSides) {
  const auto net = middle();
  const auto cf = build_choice(net, net.agent_index("b"),
                               SeparableIntensitySpec{{"u2", "u1"}, {"d1", "d2"}});
  EXPECT_EQ(cf.choose(net.all()), net.all());
  EXPECT_EQ(cf.choose(s(net, {"u1", "u2", "d2"})), s(net, {"u2", "d2"}));
  EXPECT_EQ(cf.choose(s(net, {"u1", "u2"})), ContractSet{});
}

TEST(Choice, SimpleIntensityNeedsPositiveMargin) {
  const auto net = middle();
  const auto cf = build_choice(net, net.agent_index("b"),
                               SimpleIntensitySpec{{{"u1", 5}, {"u2", 3}, {"d1", 4}, {"d2", 1}}});
  EXPECT_EQ(cf.choose(net.all()), s(net, {"u1", "d2"}));
  EXPECT_EQ(cf.choose(s(net, {"u2", "d1"})), ContractSet{});
  EXPECT_EQ(cf.choose(s(net, {"u2", "d2"})), s(net, {"u2", "d2"}));
}

TEST(Choice, UnitDemandAndResponsive) {
  const auto net = middle();
  const AgentIndex c = net.agent_index("c");
  const auto unit = build_choice(net, c, UnitDemandSpec{{"d2", "d1"}});
  EXPECT_EQ(unit.choose(net.all()), s(net, {"d2"}));
  EXPECT_EQ(unit.choose(s(net, {"d1"})), s(net, {"d1"}));

  const auto resp = build_choice(net, net.agent_index("b"),
                                 ResponsiveSpec{{"u1", "u2"}, {"d2"}, 1, 1});
  EXPECT_EQ(resp.choose(net.all()), s(net, {"u1", "d2"}));
  EXPECT_EQ(resp.choose(s(net, {"u2", "d1"})), s(net, {"u2"}));
}

TEST(Choice, TableFallsBackToEmpty) {
  const auto net = middle();
  const auto cf = build_choice(net, net.agent_index("b"),
                               TableSpec{{{{"u1", "d1"}, {"u1", "d1"}}, {{"u1"}, {}}}});
  EXPECT_EQ(cf.choose(s(net, {"u1", "d1"})), s(net, {"u1", "d1"}));
  EXPECT_EQ(cf.choose(s(net, {"u2", "d1"})), ContractSet{});
}

TEST(Choice, DropsForeignContractsBeforeChoosing) {
  const auto net = middle();
  const auto cf = build_choice(net, net.agent_index("a"), UnitDemandSpec{{"u1"}});
  EXPECT_EQ(cf.choose(net.all()), s(net, {"u1"}));
  EXPECT_EQ(cf.own(), s(net, {"u1", "u2"}));
}

TEST(Choice, SidedViews) {
  const auto net = middle();
  const auto cf = build_choice(net, net.agent_index("b"),
                               SeparableIntensitySpec{{"u1", "u2"}, {"d1", "d2"}});
  const ContractSet y = s(net, {"u1", "u2"});
  const ContractSet z = s(net, {"d1"});
  EXPECT_EQ(cf.chosen_upstream(y, z), s(net, {"u1"}));
  EXPECT_EQ(cf.rejected_upstream(y, z), s(net, {"u2"}));
  EXPECT_EQ(cf.chosen_downstream(z, y), s(net, {"d1"}));
  EXPECT_EQ(cf.rejected_downstream(z, y), ContractSet{});
}

TEST(Choice, BuildRejectsBadReferences) {
  const auto net = middle();
  const AgentIndex a = net.agent_index("a");
  EXPECT_THROW(build_choice(net, a, UnitDemandSpec{{"nope"}}), InputError);
  EXPECT_THROW(build_choice(net, a, UnitDemandSpec{{"d1"}}), InputError);  // not a's contract
  EXPECT_THROW(build_choice(net, net.agent_index("b"), SeparableIntensitySpec{{"d1"}, {}}),
               InputError);
}

TEST(Choice, OverreachingEvaluatorIsCaught) {
  const auto net = middle();
  const auto cf = make_choice(net, net.agent_index("b"), [&](ContractSet) { return net.all(); });
  EXPECT_THROW(cf.choose(s(net, {"u1"})), DomainError);
}

TEST(Choice, CountingWrapperCounts) {
  const auto net = middle();
  auto counter = std::make_shared<std::atomic<std::size_t>>(0);
  const auto cf = counting_choice(build_choice(net, 0, UnitDemandSpec{{"u1"}}), counter);
  cf.choose(net.all());
  cf.choose({});
  EXPECT_EQ(counter->load(), 2u);
}

TEST(Choice, RemapIgnoresUnknownContracts) {
  const auto net = middle();
  const auto old = build_choice(net, net.agent_index("b"), UnitDemandSpec{{"u1", "u2"}});
  // New network drops u1 and adds u3.
  const auto net2 = validate_network({{"a", "b", "c"},
                                      {{"u3", "a", "b", {}, {}},
                                       {"u2", "a", "b", {}, {}},
                                       {"d1", "b", "c", {}, {}},
                                       {"d2", "b", "c", {}, {}}}});
  const std::vector<std::optional<ContractIndex>> to_old = {std::nullopt, 1, 2, 3};
  const auto cf = remap_choice(old, net2, net2.agent_index("b"), to_old);
  EXPECT_EQ(cf.choose(net2.all()), s(net2, {"u2"}));
  EXPECT_EQ(cf.choose(s(net2, {"u3"})), ContractSet{});
}

TEST(Choice, FamilyNames) {
  EXPECT_EQ(family_name(PreferenceListSpec{}), "preference_list");
  EXPECT_EQ(family_name(ReservationSpec{}), "reservation");
}

// Every generated agent: C(Y) ⊆ Y and C(C(Y)) = C(Y); under IRC, removing
// unchosen contracts leaves the choice unchanged.
class GeneratedChoice : public ::testing::TestWithParam<std::string> {};

TEST_P(GeneratedChoice, ConsistencyProperties) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = generate_instance(seed, GetParam());
    const Market& m = inst.market;
    for (AgentIndex f = 0; f < m.network().agent_count(); ++f) {
      const auto& cf = m.cf(f);
      for_each_subset(cf.own(), [&](ContractSet y) {
        const ContractSet c = cf.choose(y);
        ASSERT_TRUE(c.subset_of(y));
        ASSERT_EQ(cf.choose(c), c) << "seed " << seed << " agent " << f;
        const ContractSet rejected = y - c;
        if (!rejected.empty()) {
          const ContractIndex drop = *rejected.begin();
          ASSERT_EQ(cf.choose(ContractSet(y).erase(drop)), c) << "seed " << seed;
        }
      });
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Profiles, GeneratedChoice,
                         ::testing::Values("fsirc", "separable", "ladlas", "simple", "acyclic"));

TEST(Choice, PartitionAgentsFollowThreshold) {
  const Market m = partition_to_gs({1, 2, 3});
  const auto& net = m.network();
  const AgentIndex f = net.agent_index("f");
  const AgentIndex g = net.agent_index("g");
  const ContractSet all = net.all();
  EXPECT_EQ(m.cf(f).choose(all), all & net.contracts_of(f));  // sum 6 >= 3
  const ContractSet y = net.downstream(f);
  const ContractSet x3 = net.to_set({"x3"});
  EXPECT_EQ(m.cf(f).choose(x3 | y), x3 | y);  // weight 3 reaches half of 6
  const ContractSet x2 = net.to_set({"x2"});
  EXPECT_EQ(m.cf(f).choose(x2 | y), x2);
  EXPECT_THROW(partition_to_gs({3, 1}), InputError);
  EXPECT_TRUE(m.cf(g).choose(all).contains(*y.begin()));
}
