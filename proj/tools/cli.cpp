#include "cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "trailnet/axioms.hpp"
#include "trailnet/dynamics.hpp"
#include "trailnet/equilibrium.hpp"
#include "trailnet/error.hpp"
#include "trailnet/fixed_point.hpp"
#include "trailnet/io.hpp"
#include "trailnet/oracle.hpp"
#include "trailnet/stability.hpp"

namespace trailnet::cli {

using nlohmann::json;

namespace {

json set_json(const ContractNetwork& net, ContractSet s) { return net.to_ids(s); }

json pair_json(const ContractNetwork& net, const OfferPair& p) {
  return {{"buyer_side", set_json(net, p.buyer_side)},
          {"seller_side", set_json(net, p.seller_side)},
          {"outcome", set_json(net, p.outcome())}};
}

json fixed_point_json(const ContractNetwork& net, const FixedPointResult& r, bool trace) {
  json o = {{"outcome", set_json(net, r.outcome)},
            {"pair", pair_json(net, r.pair)},
            {"iterations", r.iterations}};
  if (trace) {
    json t = json::array();
    for (const auto& p : r.trace) t.push_back(pair_json(net, p));
    o["trace"] = t;
  }
  return o;
}

json verdict_json(const ContractNetwork& net, const StabilityVerdict& v) {
  json o = {{"notion", notion_name(v.notion)}, {"stable", v.stable}};
  if (v.rejecting_agent) o["rejecting_agent"] = net.agents()[*v.rejecting_agent];
  if (v.blocking_trail) {
    json t = json::array();
    for (ContractIndex x : *v.blocking_trail) t.push_back(net.contract(x).id);
    o["blocking_trail"] = t;
    if (v.notion == Notion::trail) {
      o["prefix_option"] = v.prefix_option;
      o["suffix_option"] = v.suffix_option;
    }
  }
  if (v.blocking_set) o["blocking_set"] = set_json(net, *v.blocking_set);
  return o;
}

json axiom_json(const Market& market, const AxiomReport& r) {
  const auto& net = market.network();
  json o = {{"agent", net.agents()[r.agent]}, {"axiom", r.axiom}, {"holds", r.holds}};
  if (r.witness) {
    json w = json::object();
    json sets = json::object();
    for (const auto& [name, s] : r.witness->sets) sets[name] = set_json(net, s);
    w["sets"] = sets;
    if (r.witness->contract) w["contract"] = net.contract(*r.witness->contract).id;
    if (!r.witness->detail.empty()) w["detail"] = r.witness->detail;
    if (!r.witness->intensity.empty()) w["intensity"] = r.witness->intensity;
    o["witness"] = w;
  }
  if (!r.notes.empty()) o["notes"] = r.notes;
  return o;
}

json checks_json(const ContractNetwork& net, const std::vector<PreferenceCheck>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"agent", net.agents()[c.agent]},
                 {"role", c.role},
                 {"comparison", c.comparison},
                 {"expects_before", c.expects_before},
                 {"holds", c.holds}});
  return a;
}

json statics_json(const ContractNetwork& before, const ContractNetwork& after,
                  const ContractNetwork& larger, const StaticsReport& r) {
  json o = {{"preconditions_met", r.preconditions_met}, {"unmet", r.unmet}, {"all_hold", r.all_hold}};
  if (r.preconditions_met) {
    o["before"] = {{"buyer_optimal", set_json(before, r.before_max)},
                   {"seller_optimal", set_json(before, r.before_min)}};
    o["after"] = {{"buyer_optimal", set_json(after, r.after_max)},
                  {"seller_optimal", set_json(after, r.after_min)}};
  }
  o["checks"] = checks_json(larger, r.checks);
  return o;
}

ContractSet parse_outcome(const ContractNetwork& net, const std::string& text) {
  return net.to_set(parse_id_list(text));
}

std::vector<long long> parse_numbers(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("'" + item + "' is not an integer");
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text << '\n';
}

// ---------------------------------------------------------------------------
// Human rendering: objects become indented key/value lines, arrays of flat
// objects become tables.

std::string scalar(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::string s = "{";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? "," : "") + scalar(j[i]);
    return s + "}";
  }
  return j.dump();
}

bool flat(const json& j) {
  if (!j.is_object()) return false;
  for (const auto& [k, v] : j.items())
    if (v.is_object()) return false;
  return true;
}

void render(std::ostream& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array()))) {
        out << pad << k << ":\n";
        render(out, v, depth + 1);
      } else {
        out << pad << k << ": " << scalar(v) << '\n';
      }
    }
    return;
  }
  if (j.is_array() && !j.empty() && std::all_of(j.begin(), j.end(), flat)) {
    std::vector<std::string> cols;
    for (const auto& row : j)
      for (const auto& [k, v] : row.items())
        if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    std::vector<std::size_t> width;
    for (const auto& c : cols) width.push_back(c.size());
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : j) {
      cells.emplace_back();
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto it = row.find(cols[c]);
        cells.back().push_back(it == row.end() ? "" : scalar(*it));
        width[c] = std::max(width[c], cells.back().back().size());
      }
    }
    auto line = [&](const std::vector<std::string>& v) {
      out << pad;
      for (std::size_t c = 0; c < v.size(); ++c)
        out << v[c] << std::string(width[c] - v[c].size() + (c + 1 < v.size() ? 2 : 0), ' ');
      out << '\n';
    };
    line(cols);
    for (const auto& r : cells) line(r);
    return;
  }
  if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_object()) {
        out << pad << "-\n";
        render(out, v, depth + 1);
      } else {
        out << pad << "- " << scalar(v) << '\n';
      }
    }
    return;
  }
  out << pad << scalar(j) << '\n';
}

struct Globals {
  std::string format = "json";
  bool human = false;
  bool quiet = false;
  unsigned jobs = 1;
};

void emit(std::ostream& out, const Globals& g, const json& j) {
  if (g.quiet) return;
  if (g.human || g.format == "human")
    render(out, j, 0);
  else
    out << j.dump(2) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability, fixed points and equilibria of trading networks", "trailnet"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "human"}));
  app.add_flag("--human", g.human, "Render tables instead of JSON");
  app.add_flag("--quiet", g.quiet, "Print nothing; report through the exit code");
  app.add_option("--jobs", g.jobs, "Worker threads for exhaustive scans")->check(CLI::Range(1u, 256u));

  std::string instance;
  auto* validate = app.add_subcommand("validate", "Validate a network or instance");
  validate->add_option("instance", instance)->required();

  std::string side = "buyer";
  bool trace = false;
  auto* solve = app.add_subcommand("solve", "Buyer- or seller-optimal fixed point");
  solve->add_option("instance", instance)->required();
  solve->add_option("--side", side)->check(CLI::IsMember({"buyer", "seller"}));
  solve->add_flag("--trace", trace, "Include every iterate");

  bool lattice = false;
  auto* enumerate = app.add_subcommand("enumerate", "All fixed points and outcomes");
  enumerate->add_option("instance", instance)->required();
  enumerate->add_flag("--terminal-lattice", lattice, "Also build the terminal lattice");

  std::string outcome_text, notion_text = "all";
  bool per_agent = false, all_witnesses = false;
  auto* check = app.add_subcommand("check", "Stability verdicts for an outcome");
  check->add_option("instance", instance)->required();
  check->add_option("--outcome", outcome_text, "JSON array of contract ids")->required();
  check->add_option("--notion", notion_text);
  check->add_flag("--per-agent-options", per_agent,
                  "Let each intermediate agent pick the prefix or suffix condition");
  check->add_flag("--all-witnesses", all_witnesses, "List every blocking trail, not just the first");

  std::string agent_text, axiom_text;
  bool priced_axioms = false;
  auto* axioms = app.add_subcommand("check-axioms", "Run the axiom checkers");
  axioms->add_option("instance", instance)->required();
  axioms->add_option("--agent", agent_text);
  axioms->add_option("--axiom", axiom_text);
  axioms->add_flag("--priced", priced_axioms, "Read a priced instance");

  std::string trace_path, perspective = "buyer";
  auto* equilibrium = app.add_subcommand("equilibrium", "Price adjustment and competitive equilibrium");
  equilibrium->add_option("instance", instance)->required();
  equilibrium->add_option("--trace", trace_path, "Write the round-by-round trace here");
  equilibrium->add_option("--perspective", perspective)->check(CLI::IsMember({"buyer", "seller"}));

  std::string entry_path, exit_agent, readjust_text;
  bool rural = false;
  auto* dynamics = app.add_subcommand("dynamics", "Entry, exit, readjustment and rural hospitals");
  dynamics->add_option("instance", instance)->required();
  auto* entry_opt = dynamics->add_option("--entry", entry_path, "Entry event JSON");
  auto* exit_opt = dynamics->add_option("--exit", exit_agent, "Terminal agent that leaves");
  dynamics->add_option("--readjust-from", readjust_text, "Outcome to readjust from")->needs(entry_opt);
  auto* rural_opt = dynamics->add_flag("--rural-hospitals", rural, "Per-agent balance across outcomes");
  entry_opt->excludes(exit_opt);
  rural_opt->excludes(entry_opt)->excludes(exit_opt);

  auto* oracle = app.add_subcommand("oracle", "Ground truth, reductions and generators");
  oracle->require_subcommand(1);
  auto* brute = oracle->add_subcommand("brute", "Stable outcomes by literal enumeration");
  std::string brute_notion = "trail";
  brute->add_option("instance", instance)->required();
  brute->add_option("--notion", brute_notion);
  auto* partition = oracle->add_subcommand("partition", "PARTITION reduction cross-check");
  std::string weights_text;
  partition->add_option("--weights", weights_text, "Comma-separated positive integers, any order")->required();
  auto* needle = oracle->add_subcommand("needle", "Oracle-call family probe");
  std::size_t needle_n = 0;
  std::string hidden_text;
  needle->add_option("--n", needle_n)->required()->check(CLI::Range(1, 31));
  needle->add_option("--hidden", hidden_text, "Comma-separated 1-based indices");
  auto* gen = oracle->add_subcommand("gen", "Generate a certified random instance");
  std::uint64_t seed = 0;
  std::string profile = "fsirc", kind = "market", entry_out;
  gen->add_option("--seed", seed)->required();
  gen->add_option("--profile", profile);
  gen->add_option("--kind", kind)->check(CLI::IsMember({"market", "priced", "entry"}));
  gen->add_option("--entry-out", entry_out, "Where --kind entry writes the event");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  for (auto* sub : oracle->get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  StabilityOptions opts;
  opts.jobs = g.jobs;
  opts.per_agent_options = per_agent;

  try {
    if (*validate) {
      const std::string text = read_file(instance);
      const ContractNetwork net = parse_network(text, true);
      json o = {{"command", "validate"}, {"valid", true}};
      if (text.find("\"choice_functions\"") != std::string::npos) {
        parse_market(text);
        o["choice_functions"] = true;
      } else {
        o["choice_functions"] = false;
      }
      const auto part = terminal_partition(net);
      json sellers = json::array(), buyers = json::array();
      for (AgentIndex f : part.terminal_sellers) sellers.push_back(net.agents()[f]);
      for (AgentIndex f : part.terminal_buyers) buyers.push_back(net.agents()[f]);
      o["agents"] = net.agent_count();
      o["contracts"] = net.contract_count();
      o["acyclic"] = is_acyclic(net);
      o["terminal_sellers"] = sellers;
      o["terminal_buyers"] = buyers;
      emit(out, g, o);
    } else if (*solve) {
      const Market m = parse_market(read_file(instance));
      const auto r = side == "buyer" ? buyer_optimal(m, trace) : seller_optimal(m, trace);
      json o = fixed_point_json(m.network(), r, trace);
      o["command"] = "solve";
      o["side"] = side;
      emit(out, g, o);
    } else if (*enumerate) {
      const Market m = parse_market(read_file(instance));
      const auto& net = m.network();
      const auto points = enumerate_fixed_points(m, g.jobs);
      json fps = json::array(), outs = json::array();
      for (const auto& p : points) fps.push_back(pair_json(net, p));
      for (ContractSet s : fixed_point_outcomes(points)) outs.push_back(set_json(net, s));
      json o = {{"command", "enumerate"}, {"fixed_points", fps}, {"outcomes", outs}};
      if (lattice) {
        const auto t = terminal_lattice(m, g.jobs);
        json el = json::array(), img = json::array();
        for (const auto& e : t.elements) el.push_back(pair_json(net, e));
        for (const auto& e : t.canonical_images) img.push_back(pair_json(net, e));
        o["terminal_lattice"] = {{"elements", el}, {"canonical_images", img}, {"join", t.join}, {"meet", t.meet}};
      }
      emit(out, g, o);
    } else if (*check) {
      const Market m = parse_market(read_file(instance));
      const auto& net = m.network();
      const ContractSet a = parse_outcome(net, outcome_text);
      json o = {{"command", "check"}, {"outcome", set_json(net, a)}};
      json verdicts = json::array();
      if (notion_text == "all") {
        const auto profile_result = classify(m, a, opts);
        for (const auto& v : profile_result.verdicts) verdicts.push_back(verdict_json(net, v));
        o["diagram_applies"] = profile_result.diagram_applies;
      } else {
        const auto n = parse_notion(notion_text);
        if (!n) throw InputError("unknown notion '" + notion_text + "'");
        verdicts.push_back(verdict_json(net, check_stability(m, a, *n, opts)));
      }
      if (all_witnesses) {
        json listed = json::object();
        for (Notion n : kAllNotions) {
          if (n == Notion::acceptable || n == Notion::set) continue;
          if (notion_text != "all" && parse_notion(notion_text) != n) continue;
          json trails = json::array();
          for (const auto& v : all_blocking_trails(m, a, n, opts)) trails.push_back(verdict_json(net, v));
          listed[notion_name(n)] = trails;
        }
        o["all_blocking_trails"] = listed;
      }
      o["verdicts"] = verdicts;
      emit(out, g, o);
    } else if (*axioms) {
      const std::string text = read_file(instance);
      std::optional<PricedMarket> pm;
      std::optional<Market> plain;
      if (priced_axioms)
        pm.emplace(parse_priced(text));
      else
        plain.emplace(parse_market(text));
      const Market& m = pm ? pm->market() : *plain;
      const auto& net = m.network();
      std::vector<std::string> names;
      if (!axiom_text.empty()) {
        if (std::find(axiom_names().begin(), axiom_names().end(), axiom_text) == axiom_names().end())
          throw InputError("unknown axiom '" + axiom_text + "'");
        names = {axiom_text};
      } else if (pm) {
        names = {"feasibility", "cp", "pm", "full_substitutability", "irc"};
      } else {
        names = {"irc", "full_substitutability", "lad_las", "separability", "simplicity", "w_contraction"};
      }
      std::vector<AgentIndex> agents;
      if (!agent_text.empty())
        agents = {net.agent_index(agent_text)};
      else
        for (AgentIndex f = 0; f < net.agent_count(); ++f) agents.push_back(f);
      json reports = json::array();
      for (AgentIndex f : agents) {
        for (const auto& name : names) {
          try {
            reports.push_back(axiom_json(m, run_axiom(m, f, name)));
          } catch (const GuardExceeded& e) {
            reports.push_back({{"agent", net.agents()[f]}, {"axiom", name}, {"skipped", e.what()}});
          }
        }
      }
      emit(out, g, reports);
    } else if (*equilibrium) {
      const PricedMarket pm(parse_priced(read_file(instance)));
      const auto& net = pm.network();
      const auto persp = perspective == "buyer" ? Perspective::buyer : Perspective::seller;
      const auto adj = price_adjustment(pm, persp);
      const auto arr = complete_prices(pm, adj);
      const auto audit = audit_trace(pm, adj);
      json trades = json::array();
      for (std::size_t t = 0; t < pm.trades().size(); ++t)
        trades.push_back({{"id", pm.trades()[t].id}, {"realized", static_cast<bool>(arr.realized[t])},
                          {"price", arr.prices[t]}});
      json o = {{"command", "equilibrium"},
                {"perspective", perspective},
                {"outcome", set_json(net, adj.outcome)},
                {"trades", trades},
                {"competitive_equilibrium", verify_competitive_equilibrium(pm, arr)},
                {"rounds", adj.rounds.size()},
                {"trail_stable", check_stability(pm.market(), adj.outcome, Notion::trail, opts).stable},
                {"fully_trail_stable",
                 check_stability(pm.market(), adj.outcome, Notion::full_trail, opts).stable},
                {"audit",
                 {{"prices_monotone", audit.prices_monotone},
                  {"offers_stay_open", audit.offers_stay_open},
                  {"rejections_final", audit.rejections_final},
                  {"detail", audit.detail}}}};
      if (!trace_path.empty()) {
        json rounds = json::array();
        for (const auto& r : adj.rounds) {
          json prices = json::object();
          for (std::size_t t = 0; t < pm.trades().size(); ++t) prices[pm.trades()[t].id] = r.prices[t];
          rounds.push_back({{"pair", pair_json(net, r.pair)},
                            {"offered", set_json(net, r.offered)},
                            {"rejected", set_json(net, r.rejected)},
                            {"prices", prices}});
        }
        write_file(trace_path, json{{"perspective", perspective}, {"rounds", rounds}}.dump(2));
      }
      emit(out, g, o);
    } else if (*dynamics) {
      const Market m = parse_market(read_file(instance));
      const auto& net = m.network();
      json o = {{"command", "dynamics"}};
      if (!entry_path.empty()) {
        const EntryEvent e = parse_entry(read_file(entry_path));
        const Surgery after = apply_entry(m, e);
        o["event"] = "entry";
        o["statics"] = statics_json(net, after.market.network(), after.market.network(),
                                    entry_comparative_statics(m, e));
        if (!readjust_text.empty()) {
          const auto r = market_readjustment(m, parse_outcome(net, readjust_text), e);
          const auto& big = after.market.network();
          o["readjustment"] = {{"seed", pair_json(big, r.seed)},
                               {"result", fixed_point_json(big, r.result, true)},
                               {"before", set_json(net, r.before)},
                               {"after", set_json(big, r.after)},
                               {"checks", checks_json(big, r.checks)},
                               {"all_hold", r.all_hold}};
        }
      } else if (!exit_agent.empty()) {
        const Surgery after = apply_exit(m, exit_agent);
        o["event"] = "exit";
        o["statics"] = statics_json(net, after.market.network(), net, exit_comparative_statics(m, exit_agent));
      } else if (rural) {
        const auto r = rural_hospitals_check(m, g.jobs);
        json outs = json::array(), balance = json::object();
        for (ContractSet s : r.outcomes) outs.push_back(set_json(net, s));
        for (AgentIndex f = 0; f < r.balance.size(); ++f) balance[net.agents()[f]] = r.balance[f];
        o["event"] = "rural_hospitals";
        o["rural_hospitals"] = {{"preconditions_met", r.preconditions_met},
                                {"unmet", r.unmet},
                                {"outcomes", outs},
                                {"balance", balance},
                                {"invariant", r.invariant}};
        if (r.counterexample_agent) o["rural_hospitals"]["counterexample_agent"] = net.agents()[*r.counterexample_agent];
      } else {
        throw InputError("dynamics needs --entry, --exit or --rural-hospitals");
      }
      emit(out, g, o);
    } else if (*brute) {
      const Market m = parse_market(read_file(instance));
      const auto n = parse_notion(brute_notion);
      if (!n) throw InputError("unknown notion '" + brute_notion + "'");
      json outs = json::array();
      for (ContractSet s : brute_force_stable(m, *n)) outs.push_back(set_json(m.network(), s));
      emit(out, g, {{"command", "oracle brute"}, {"notion", notion_name(*n)}, {"stable_outcomes", outs}});
    } else if (*partition) {
      auto weights = parse_numbers(weights_text);
      std::sort(weights.begin(), weights.end());
      const bool yes = solve_partition(weights);
      const Market m = partition_to_gs(weights);
      const auto v = find_blocking_set(m, ContractSet{}, opts);
      json o = {{"command", "oracle partition"},
                {"weights", weights},
                {"partition_exists", yes},
                {"empty_set_stable", v.stable},
                {"agree", yes == !v.stable}};
      if (v.blocking_set) o["blocking_set"] = set_json(m.network(), *v.blocking_set);
      emit(out, g, o);
    } else if (*needle) {
      std::optional<std::vector<std::size_t>> hidden;
      if (!hidden_text.empty()) {
        hidden.emplace();
        for (long long i : parse_numbers(hidden_text)) {
          if (i < 1) throw InputError("hidden indices are 1-based");
          hidden->push_back(static_cast<std::size_t>(i));
        }
      }
      const auto probe = probe_needle(needle_n, hidden);
      json o = {{"command", "oracle needle"},
                {"n", needle_n},
                {"hidden", hidden ? json(*hidden) : json(nullptr)},
                {"empty_set_stable", probe.empty_set_stable},
                {"evaluations", probe.evaluations}};
      if (probe.blocking_set) o["blocking_set"] = set_json(needle_family(needle_n, hidden).network(), *probe.blocking_set);
      emit(out, g, o);
    } else if (*gen) {
      // Generated documents are instances, so they go out as plain JSON.
      if (kind == "market") {
        if (!g.quiet) out << market_to_json(generate_instance(seed, profile).market) << '\n';
      } else if (kind == "priced") {
        if (!g.quiet) out << priced_to_json(generate_priced(seed)) << '\n';
      } else {
        if (entry_out.empty()) throw InputError("--kind entry needs --entry-out");
        const auto s = generate_entry_scenario(seed);
        write_file(entry_out, entry_to_json(s.event));
        if (!g.quiet) out << market_to_json(s.base.market) << '\n';
      }
    }
  } catch (const ValidationError& e) {
    if (!g.quiet)
      emit(out, Globals{},
           {{"error", {{"kind", "validation"}, {"message", e.what()}, {"problems", e.problems()}}}});
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    if (!g.quiet) emit(out, Globals{}, {{"error", {{"kind", "input"}, {"message", e.what()}}}});
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    const char* kind = dynamic_cast<const GuardExceeded*>(&e)    ? "guard"
                       : dynamic_cast<const AxiomViolation*>(&e) ? "axiom"
                                                                 : "domain";
    if (!g.quiet) emit(out, Globals{}, {{"error", {{"kind", kind}, {"message", e.what()}}}});
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace trailnet::cli
