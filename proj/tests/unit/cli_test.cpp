#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"
#include "trailnet/io.hpp"
#include "trailnet/oracle.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json parsed() const { return json::parse(out); }
};

Run run(std::initializer_list<std::string> args) {
  std::vector<std::string> owned = {"trailnet"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = trailnet::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string inst(const std::string& name) {
  return trailnet::test::data_path("instances/" + name + ".json");
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("trailnet_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(Cli, Validate) {
  const auto r = run({"validate", inst("example1")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  EXPECT_EQ(j["command"], "validate");
  EXPECT_EQ(j["contracts"], 4);
  EXPECT_EQ(j["acyclic"], false);
  EXPECT_EQ(j["terminal_sellers"], json::array({"m"}));
}

TEST(Cli, SolveBothSides) {
  for (const char* side : {"buyer", "seller"}) {
    const auto r = run({"solve", inst("example1"), "--side", side, "--trace"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = r.parsed();
    EXPECT_EQ(j["outcome"], json::array({"w"}));
    EXPECT_TRUE(j.contains("trace"));
  }
}

TEST(Cli, EnumerateWithLattice) {
  const auto r = run({"enumerate", inst("reduced")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.parsed()["outcomes"].is_array());
}

TEST(Cli, CheckSingleNotionAndAll) {
  auto r = run({"check", inst("example1"), "--outcome", R"(["w"])", "--notion", "set"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = r.parsed();
  EXPECT_EQ(j["verdicts"][0]["stable"], false);
  EXPECT_TRUE(j["verdicts"][0].contains("blocking_set"));

  r = run({"check", inst("example3"), "--outcome", R"(["z","y"])", "--notion", "chain",
           "--all-witnesses"});
  ASSERT_EQ(r.code, 0) << r.err;
  j = r.parsed();
  bool listed = false;
  for (const auto& v : j["all_blocking_trails"]["chain"])
    if (v["blocking_trail"] == json::array({"w", "x"})) listed = true;
  EXPECT_TRUE(listed);

  r = run({"check", inst("example2"), "--outcome", "[]", "--notion", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["verdicts"].size(), 6u);
}

TEST(Cli, CheckAxioms) {
  const auto r = run({"check-axioms", inst("example2"), "--agent", "j", "--axiom", "separability"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["holds"], false);
  EXPECT_TRUE(j[0].contains("witness"));
}

TEST(Cli, EquilibriumWithTrace) {
  const std::string priced =
      temp_file("priced.json", trailnet::priced_to_json(trailnet::generate_priced(1)));
  const std::string trace = temp_file("trace.json", "");
  const auto r = run({"equilibrium", priced, "--perspective", "seller", "--trace", trace});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  EXPECT_EQ(j["competitive_equilibrium"], true);
  EXPECT_EQ(j["audit"]["prices_monotone"], true);
  const json t = json::parse(trailnet::read_file(trace));
  EXPECT_EQ(t["perspective"], "seller");
  EXPECT_FALSE(t["rounds"].empty());
}

TEST(Cli, DynamicsEntryExitRural) {
  const auto sc = trailnet::generate_entry_scenario(3);
  const std::string base = temp_file("base.json", trailnet::market_to_json(sc.base.market));
  const std::string entry = temp_file("entry.json", trailnet::entry_to_json(sc.event));
  auto r = run({"dynamics", base, "--entry", entry});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["event"], "entry");
  EXPECT_EQ(r.parsed()["statics"]["all_hold"], true);

  r = run({"dynamics", base, "--rural-hospitals"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["rural_hospitals"]["invariant"], true);

  r = run({"validate", base});
  const std::string seller = r.parsed()["terminal_sellers"][0];
  r = run({"dynamics", base, "--exit", seller});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["event"], "exit");
}

TEST(Cli, OracleCommands) {
  auto r = run({"oracle", "partition", "--weights", "3,1,1,2,2,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["partition_exists"], true);
  EXPECT_EQ(r.parsed()["agree"], true);

  r = run({"oracle", "needle", "--n", "2", "--hidden", "1,3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["empty_set_stable"], false);

  r = run({"oracle", "brute", inst("example1"), "--notion", "chain"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["stable_outcomes"], json::array({json::array({"w"})}));

  r = run({"oracle", "gen", "--seed", "5", "--profile", "separable"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NO_THROW(trailnet::parse_market(r.out));
}

TEST(Cli, HumanAndQuiet) {
  auto r = run({"--human", "validate", inst("example1")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("acyclic"), std::string::npos);
  EXPECT_THROW(json::parse(r.out), json::parse_error);
  r = run({"--quiet", "validate", inst("example1")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"validate", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(run({"check", inst("example1"), "--outcome", R"(["nope"])"}).code, 2);
  EXPECT_EQ(run({"check", inst("example1"), "--outcome", "[]", "--notion", "vague"}).code, 2);
  // Non-terminal exit is an input error; a lattice without its axioms a domain one.
  EXPECT_EQ(run({"dynamics", inst("example1"), "--exit", "j"}).code, 2);
  const std::string complements = temp_file("complements.json", R"({
    "agents": ["a", "b", "c"],
    "contracts": [{"id": "u1", "seller": "a", "buyer": "b"}, {"id": "u2", "seller": "a", "buyer": "b"},
                  {"id": "d", "seller": "b", "buyer": "c"}],
    "choice_functions": [
      {"agent": "a", "type": "unit_demand", "order": ["u1", "u2"]},
      {"agent": "b", "type": "preference_list", "ranking": [["u1", "u2", "d"]]},
      {"agent": "c", "type": "unit_demand", "order": ["d"]}]})");
  const auto r = run({"enumerate", complements, "--terminal-lattice"});
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"--help"}).code, 0);
}
