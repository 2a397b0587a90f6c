#include <gtest/gtest.h>

#include "support.hpp"
#include "trailnet/axioms.hpp"
#include "trailnet/error.hpp"
#include "trailnet/oracle.hpp"

using namespace trailnet;

namespace {

Market middle_market(ChoiceSpec b_spec) {
  auto net = validate_network({{"a", "b", "c"},
                               {{"u1", "a", "b", {}, {}},
                                {"u2", "a", "b", {}, {}},
                                {"d1", "b", "c", {}, {}}}});
  return Market::from_specs(std::move(net), {UnitDemandSpec{{"u1", "u2"}}, std::move(b_spec),
                                             UnitDemandSpec{{"d1"}}});
}

}  // namespace

TEST(Axioms, ComplementsFailSubstitutabilityWithReplayableWitness) {
  const Market m = middle_market(PreferenceListSpec{{{"u1", "u2", "d1"}}});
  const auto r = check_full_substitutability(m.cf(1));
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(witness_reproduces(m, r));
  EXPECT_TRUE(check_irc(m.cf(1)).holds);
}

TEST(Axioms, SeparableIntensityIsWellBehaved) {
  const Market m = middle_market(SeparableIntensitySpec{{"u2", "u1"}, {"d1"}});
  for (const char* name : {"irc", "full_substitutability", "lad_las", "separability"})
    EXPECT_TRUE(run_axiom(m, 1, name).holds) << name;
}

TEST(Axioms, SimplicityWithOwnIntensity) {
  const Market m = middle_market(SimpleIntensitySpec{{{"u1", 3}, {"u2", 2}, {"d1", 1}}});
  const auto w = find_intensity(m, 1);
  ASSERT_TRUE(w);
  EXPECT_TRUE(check_simplicity(m.cf(1), *w).holds);
}

TEST(Axioms, SimplicityFailsForWrongIntensity) {
  const Market m = middle_market(SimpleIntensitySpec{{{"u1", 3}, {"u2", 2}, {"d1", 1}}});
  // Under this intensity u1 is worth less than d1, yet {u1,d1} is chosen.
  const std::vector<double> w = {0.5, 2, 1};
  const auto r = check_simplicity(m.cf(1), w);
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(witness_reproduces(m, r));
}

TEST(Axioms, Example2MiddleAgentIsNotSeparable) {
  const Market m = test::load("example2");
  const auto r = check_separability(m.cf(m.network().agent_index("j")));
  EXPECT_FALSE(r.holds);
  EXPECT_TRUE(witness_reproduces(m, r));
}

TEST(Axioms, RationalPairNeedsBothSides) {
  const Market m = middle_market(PreferenceListSpec{{{"u1", "d1"}}});
  const auto& cf = m.cf(1);
  const auto& net = m.network();
  EXPECT_TRUE(is_rational_pair(cf, net.contract_index("u1"), net.contract_index("d1"), {}));
  EXPECT_THROW(is_rational_pair(cf, net.contract_index("d1"), net.contract_index("u1"), {}),
               InputError);
  EXPECT_TRUE(is_w_rational(cf, test::ids(m, {"u1", "d1"}), {}));
  EXPECT_FALSE(is_w_rational(cf, test::ids(m, {"u1"}), {}));
}

TEST(Axioms, UnknownAxiomNameIsInputError) {
  const Market m = middle_market(PreferenceListSpec{});
  EXPECT_THROW(run_axiom(m, 0, "telepathy"), InputError);
  EXPECT_EQ(axiom_names().size(), 9u);
}

TEST(Axioms, GuardTrips) {
  NetworkDescription d{{"a", "b"}, {}};
  std::vector<ContractId> order;
  for (int i = 0; i < 17; ++i) {
    d.contracts.push_back({"x" + std::to_string(i), "a", "b", {}, {}});
    order.push_back(d.contracts.back().id);
  }
  const Market m = Market::from_specs(validate_network(d), {UnitDemandSpec{}, UnitDemandSpec{order}});
  EXPECT_THROW(check_irc(m.cf(1)), GuardExceeded);
}

class Certificates : public ::testing::TestWithParam<std::string> {};

TEST_P(Certificates, GeneratedInstancesHoldTheirCertificates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_instance(seed, GetParam());
    ASSERT_FALSE(inst.certificates.empty());
    if (GetParam() == "acyclic") EXPECT_TRUE(is_acyclic(inst.market.network()));
    std::vector<std::string> plain;
    for (const auto& c : inst.certificates)
      if (c != "simplicity" && c != "acyclic") plain.push_back(c);
    const auto failure = first_failure(inst.market, plain);
    EXPECT_FALSE(failure) << "seed " << seed << ": " << failure->axiom;
  }
}

INSTANTIATE_TEST_SUITE_P(Profiles, Certificates,
                         ::testing::Values("fsirc", "separable", "ladlas", "simple", "acyclic"));

TEST(Axioms, EveryFailingReportReplays) {
  // Random markets without certificates: whatever fails must replay.
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = generate_instance(seed, "acyclic");
    const Market& m = inst.market;
    for (AgentIndex f = 0; f < m.network().agent_count(); ++f) {
      for (const char* name : {"irc", "full_substitutability", "lad_las", "separability",
                               "w_contraction"}) {
        const auto r = run_axiom(m, f, name);
        if (!r.holds) {
          ++failures;
          EXPECT_TRUE(witness_reproduces(m, r)) << name << " seed " << seed;
        }
      }
    }
  }
  SUCCEED() << failures << " failing reports replayed";
}
