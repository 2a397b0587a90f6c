#include <gtest/gtest.h>

#include "support.hpp"
#include "trailnet/error.hpp"
#include "trailnet/oracle.hpp"
#include "trailnet/stability.hpp"

using namespace trailnet;

TEST(Stability, NotionNames) {
  for (Notion n : kAllNotions) EXPECT_EQ(parse_notion(notion_name(n)), n);
  EXPECT_EQ(parse_notion("full_trail"), Notion::full_trail);
  EXPECT_EQ(parse_notion("strong_trail"), Notion::strong_trail);
  EXPECT_FALSE(parse_notion("loose"));
}

TEST(Stability, UnacceptableOutcomeNamesAnAgent) {
  const Market m = test::load("example1");
  const auto v = check_acceptable(m, test::ids(m, {"x"}));
  EXPECT_FALSE(v.stable);
  ASSERT_TRUE(v.rejecting_agent);
  EXPECT_TRUE(witness_blocks(m, test::ids(m, {"x"}), v));
  EXPECT_FALSE(check_stability(m, test::ids(m, {"x"}), Notion::set).stable);
}

TEST(Stability, Example1TrailStableButNotSetStable) {
  const Market m = test::load("example1");
  const ContractSet w = test::ids(m, {"w"});
  EXPECT_TRUE(find_blocking_trail(m, w).stable);
  EXPECT_TRUE(find_blocking_chain(m, w).stable);
  const auto v = find_blocking_set(m, w);
  EXPECT_FALSE(v.stable);
  ASSERT_TRUE(v.blocking_set);
  EXPECT_TRUE(witness_blocks(m, w, v));
}

TEST(Stability, Example2LocalWitness) {
  const Market m = test::load("example2");
  const auto v = find_locally_blocking_trail(m, {});
  ASSERT_FALSE(v.stable);
  EXPECT_EQ(*v.blocking_trail, test::trail(m, {"w", "z", "y", "x"}));
  EXPECT_TRUE(witness_blocks(m, {}, v));
}

TEST(Stability, FirstListedTrailIsTheFindersWitness) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = generate_instance(seed, "fsirc");
    const Market& m = inst.market;
    for (Notion n : {Notion::trail, Notion::full_trail, Notion::chain, Notion::strong_trail}) {
      for (ContractSet a : {ContractSet{}, buyer_optimal(m).outcome}) {
        const auto v = check_stability(m, a, n);
        const auto all = all_blocking_trails(m, a, n);
        EXPECT_EQ(v.stable, all.empty()) << notion_name(n) << " seed " << seed;
        if (!all.empty()) {
          EXPECT_EQ(*v.blocking_trail, *all.front().blocking_trail);
          for (const auto& w : all) EXPECT_TRUE(witness_blocks(m, a, w));
        }
      }
    }
  }
}

TEST(Stability, AllBlockingTrailsRejectsNonTrailNotions) {
  const Market m = test::load("example1");
  EXPECT_THROW(all_blocking_trails(m, {}, Notion::set), InputError);
  EXPECT_THROW(all_blocking_trails(m, {}, Notion::acceptable), InputError);
}

// Engine verdicts agree with brute force on every outcome, and every witness
// replays, across all generator profiles.
class EngineVsBrute : public ::testing::TestWithParam<std::string> {};

TEST_P(EngineVsBrute, AgreeOnEveryOutcome) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto inst = generate_instance(seed, GetParam());
    const Market& m = inst.market;
    for (Notion n : kAllNotions) {
      const auto stable = brute_force_stable(m, n);
      std::vector<ContractSet> engine;
      for_each_subset(m.network().all(), [&](ContractSet a) {
        const auto v = check_stability(m, a, n);
        if (v.stable)
          engine.push_back(a);
        else
          EXPECT_TRUE(witness_blocks(m, a, v)) << notion_name(n);
      });
      std::sort(engine.begin(), engine.end());
      EXPECT_EQ(engine, stable) << GetParam() << " seed " << seed << " " << notion_name(n);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Profiles, EngineVsBrute,
                         ::testing::Values("fsirc", "separable", "ladlas", "simple", "acyclic"));

TEST(Stability, ParallelSearchMatchesSerial) {
  StabilityOptions par;
  par.jobs = 3;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = generate_instance(seed, "fsirc");
    const Market& m = inst.market;
    for (Notion n : kAllNotions) {
      const auto a = check_stability(m, {}, n);
      const auto b = check_stability(m, {}, n, par);
      EXPECT_EQ(a.stable, b.stable);
      EXPECT_EQ(a.blocking_trail, b.blocking_trail);
      EXPECT_EQ(a.blocking_set, b.blocking_set);
    }
  }
}

TEST(Stability, ClassifyHonoursTheDiagram) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = generate_instance(seed, "fsirc");
    const Market& m = inst.market;
    for_each_subset(m.network().all(), [&](ContractSet a) {
      const auto p = classify(m, a);
      EXPECT_TRUE(p.diagram_applies);
      if (p[Notion::set].stable) EXPECT_TRUE(p[Notion::full_trail].stable);
      if (p[Notion::full_trail].stable) EXPECT_TRUE(p[Notion::trail].stable);
      if (p[Notion::trail].stable) EXPECT_TRUE(p[Notion::chain].stable);
    });
  }
}

TEST(Stability, PerAgentOptionsOnlyWidenTheBlockingFamily) {
  StabilityOptions per;
  per.per_agent_options = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate_instance(seed, "fsirc");
    const Market& m = inst.market;
    for_each_subset(m.network().all(), [&](ContractSet a) {
      const auto strict = find_blocking_trail(m, a);
      const auto loose = find_blocking_trail(m, a, per);
      if (!strict.stable) EXPECT_FALSE(loose.stable);
      if (!loose.stable) EXPECT_TRUE(witness_blocks(m, a, loose));
    });
  }
}

TEST(Stability, TrailGuard) {
  const Market m = test::load("example3");
  StabilityOptions tiny;
  tiny.max_trails = 1;
  EXPECT_THROW(all_blocking_trails(m, {}, Notion::trail, tiny), GuardExceeded);
}
