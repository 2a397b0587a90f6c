#include "trailnet/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trailnet/error.hpp"

namespace trailnet {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw InputError("unknown field '" + key + "' in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

template <class T>
T as(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InputError(what + " has the wrong type");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  return as<T>(need(j, key, where), std::string(key) + " in " + where);
}

template <class T>
std::optional<T> maybe(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return as<T>(*it, std::string(key) + " in " + where);
}

std::vector<ContractId> ids(const json& j, const char* key, const std::string& where) {
  return get<std::vector<ContractId>>(j, key, where);
}

std::size_t count(const json& j, const char* key, const std::string& where) {
  const long long v = get<long long>(j, key, where);
  if (v < 0) throw InputError(std::string(key) + " in " + where + " must be non-negative");
  return static_cast<std::size_t>(v);
}

std::optional<std::size_t> maybe_count(const json& j, const char* key, const std::string& where) {
  auto v = maybe<long long>(j, key, where);
  if (!v) return std::nullopt;
  if (*v < 0) throw InputError(std::string(key) + " in " + where + " must be non-negative");
  return static_cast<std::size_t>(*v);
}

// Parses the family part of a choice-function object; `extra` names keys the
// caller consumes itself (e.g. "agent").
ChoiceSpec parse_spec(const json& j, const std::string& where, std::initializer_list<const char*> extra) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  const std::string type = get<std::string>(j, "type", where);
  auto allow = [&](std::initializer_list<const char*> own) {
    std::vector<const char*> keys(extra);
    keys.push_back("type");
    keys.insert(keys.end(), own);
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items())
      if (!ok.count(key)) throw InputError("unknown field '" + key + "' in " + where);
  };
  const std::string at = where + " (" + type + ")";
  if (type == "preference_list") {
    allow({"ranking"});
    return PreferenceListSpec{get<std::vector<std::vector<ContractId>>>(j, "ranking", at)};
  }
  if (type == "separable_intensity") {
    allow({"upstream_order", "downstream_order"});
    return SeparableIntensitySpec{ids(j, "upstream_order", at), ids(j, "downstream_order", at)};
  }
  if (type == "simple_intensity") {
    allow({"intensity"});
    return SimpleIntensitySpec{get<std::map<ContractId, double>>(j, "intensity", at)};
  }
  if (type == "unit_demand") {
    allow({"order"});
    return UnitDemandSpec{ids(j, "order", at)};
  }
  if (type == "responsive") {
    allow({"upstream", "downstream", "capacity_buy", "capacity_sell"});
    return ResponsiveSpec{ids(j, "upstream", at), ids(j, "downstream", at),
                          count(j, "capacity_buy", at), count(j, "capacity_sell", at)};
  }
  if (type == "partition_f" || type == "partition_g") {
    allow({"weights", "x_contracts", "y_contract"});
    auto w = get<std::vector<long long>>(j, "weights", at);
    auto x = ids(j, "x_contracts", at);
    auto y = get<ContractId>(j, "y_contract", at);
    if (type == "partition_f") return PartitionFSpec{std::move(w), std::move(x), std::move(y)};
    return PartitionGSpec{std::move(w), std::move(x), std::move(y)};
  }
  if (type == "needle_f") {
    allow({"n", "hidden", "x_contracts", "y_contract"});
    return NeedleFSpec{count(j, "n", at), maybe<std::vector<std::size_t>>(j, "hidden", at),
                       ids(j, "x_contracts", at), get<ContractId>(j, "y_contract", at)};
  }
  if (type == "table") {
    allow({"entries"});
    TableSpec t;
    const json& entries = need(j, "entries", at);
    if (!entries.is_array()) throw InputError("entries in " + at + " must be an array");
    for (const auto& e : entries) {
      only_keys(e, {"offer", "choice"}, "table entry of " + where);
      t.entries.emplace_back(ids(e, "offer", at), ids(e, "choice", at));
    }
    return t;
  }
  if (type == "reservation") {
    allow({"values", "costs", "capacity_buy", "capacity_sell"});
    ReservationSpec r;
    if (auto v = maybe<std::map<std::string, long long>>(j, "values", at)) r.values = *v;
    if (auto c = maybe<std::map<std::string, long long>>(j, "costs", at)) r.costs = *c;
    r.capacity_buy = maybe_count(j, "capacity_buy", at);
    r.capacity_sell = maybe_count(j, "capacity_sell", at);
    return r;
  }
  throw InputError("unknown choice-function type '" + type + "' in " + where);
}

std::vector<std::pair<AgentId, ChoiceSpec>> parse_choice_list(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw InputError(where + " must be an array");
  std::vector<std::pair<AgentId, ChoiceSpec>> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!arr[i].is_object()) throw InputError(at + " must be a JSON object");
    out.emplace_back(get<AgentId>(arr[i], "agent", at), parse_spec(arr[i], at, {"agent"}));
  }
  return out;
}

Contract parse_contract(const json& c, const std::string& at) {
  only_keys(c, {"id", "seller", "buyer", "label"}, at);
  return {get<ContractId>(c, "id", at), get<AgentId>(c, "seller", at), get<AgentId>(c, "buyer", at),
          maybe<std::string>(c, "label", at), std::nullopt};
}

NetworkDescription parse_description(const json& j) {
  NetworkDescription d;
  d.agents = get<std::vector<AgentId>>(j, "agents", "network");
  const json& cs = need(j, "contracts", "network");
  if (!cs.is_array()) throw InputError("contracts must be an array");
  for (std::size_t i = 0; i < cs.size(); ++i)
    d.contracts.push_back(parse_contract(cs[i], "contracts[" + std::to_string(i) + "]"));
  return d;
}

json contract_json(const Contract& c) {
  json o = {{"id", c.id}, {"seller", c.seller}, {"buyer", c.buyer}};
  if (c.label && !c.price) o["label"] = *c.label;
  return o;
}

struct SpecToJson {
  json operator()(const PreferenceListSpec& s) const { return {{"ranking", s.ranking}}; }
  json operator()(const SeparableIntensitySpec& s) const {
    return {{"upstream_order", s.upstream_order}, {"downstream_order", s.downstream_order}};
  }
  json operator()(const SimpleIntensitySpec& s) const { return {{"intensity", s.intensity}}; }
  json operator()(const UnitDemandSpec& s) const { return {{"order", s.order}}; }
  json operator()(const ResponsiveSpec& s) const {
    return {{"upstream", s.upstream}, {"downstream", s.downstream},
            {"capacity_buy", s.capacity_buy}, {"capacity_sell", s.capacity_sell}};
  }
  json operator()(const PartitionFSpec& s) const {
    return {{"weights", s.weights}, {"x_contracts", s.x_contracts}, {"y_contract", s.y_contract}};
  }
  json operator()(const PartitionGSpec& s) const {
    return {{"weights", s.weights}, {"x_contracts", s.x_contracts}, {"y_contract", s.y_contract}};
  }
  json operator()(const NeedleFSpec& s) const {
    json o = {{"n", s.n}, {"x_contracts", s.x_contracts}, {"y_contract", s.y_contract}};
    if (s.hidden) o["hidden"] = *s.hidden;
    return o;
  }
  json operator()(const TableSpec& s) const {
    json entries = json::array();
    for (const auto& [offer, choice] : s.entries) entries.push_back({{"offer", offer}, {"choice", choice}});
    return {{"entries", entries}};
  }
  json operator()(const ReservationSpec& s) const {
    json o = json::object();
    if (!s.values.empty()) o["values"] = s.values;
    if (!s.costs.empty()) o["costs"] = s.costs;
    if (s.capacity_buy) o["capacity_buy"] = *s.capacity_buy;
    if (s.capacity_sell) o["capacity_sell"] = *s.capacity_sell;
    return o;
  }
};

json spec_json(const ChoiceSpec& spec, const std::optional<AgentId>& agent) {
  json o = json::object();
  if (agent) o["agent"] = *agent;
  o["type"] = family_name(spec);
  const json fields = std::visit(SpecToJson{}, spec);
  for (const auto& [k, v] : fields.items()) o[k] = v;
  return o;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ContractNetwork parse_network(std::string_view text, bool allow_choice_functions) {
  const json j = parse_json(text);
  if (allow_choice_functions)
    only_keys(j, {"agents", "contracts", "choice_functions"}, "network");
  else
    only_keys(j, {"agents", "contracts"}, "network");
  return validate_network(parse_description(j));
}

Market parse_market(std::string_view text) {
  const json j = parse_json(text);
  only_keys(j, {"agents", "contracts", "choice_functions"}, "instance");
  ContractNetwork net = validate_network(parse_description(j));
  auto list = parse_choice_list(need(j, "choice_functions", "instance"), "choice_functions");
  std::vector<std::optional<ChoiceSpec>> specs(net.agent_count());
  for (auto& [agent, spec] : list) {
    const AgentIndex f = net.agent_index(agent);
    if (specs[f]) throw InputError("two choice functions for agent '" + agent + "'");
    specs[f] = std::move(spec);
  }
  std::vector<ChoiceSpec> all;
  for (AgentIndex f = 0; f < specs.size(); ++f) {
    if (!specs[f]) throw InputError("no choice function for agent '" + net.agents()[f] + "'");
    all.push_back(std::move(*specs[f]));
  }
  return Market::from_specs(std::move(net), std::move(all));
}

PricedDescription parse_priced(std::string_view text) {
  const json j = parse_json(text);
  only_keys(j, {"agents", "trades", "choice_functions"}, "priced instance");
  PricedDescription d;
  if (auto a = maybe<std::vector<AgentId>>(j, "agents", "priced instance")) d.agents = *a;
  const json& ts = need(j, "trades", "priced instance");
  if (!ts.is_array()) throw InputError("trades must be an array");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string at = "trades[" + std::to_string(i) + "]";
    only_keys(ts[i], {"id", "seller", "buyer", "price_min", "price_max"}, at);
    d.trades.push_back({get<std::string>(ts[i], "id", at), get<AgentId>(ts[i], "seller", at),
                        get<AgentId>(ts[i], "buyer", at), get<long long>(ts[i], "price_min", at),
                        get<long long>(ts[i], "price_max", at)});
  }
  d.choice_functions = parse_choice_list(need(j, "choice_functions", "priced instance"), "choice_functions");
  return d;
}

EntryEvent parse_entry(std::string_view text) {
  const json j = parse_json(text);
  only_keys(j, {"agent", "side", "contracts", "choice_function", "updated_choice_functions"}, "entry");
  EntryEvent e;
  e.new_agent = get<AgentId>(j, "agent", "entry");
  const auto side = get<std::string>(j, "side", "entry");
  if (side == "terminal_seller")
    e.side = EntrySide::terminal_seller;
  else if (side == "terminal_buyer")
    e.side = EntrySide::terminal_buyer;
  else
    throw InputError("side must be terminal_seller or terminal_buyer, got '" + side + "'");
  const json& cs = need(j, "contracts", "entry");
  if (!cs.is_array()) throw InputError("entry contracts must be an array");
  for (std::size_t i = 0; i < cs.size(); ++i)
    e.contracts.push_back(parse_contract(cs[i], "entry contracts[" + std::to_string(i) + "]"));
  e.choice = parse_spec(need(j, "choice_function", "entry"), "entry choice_function", {});
  if (auto it = j.find("updated_choice_functions"); it != j.end()) {
    for (auto& [agent, spec] : parse_choice_list(*it, "updated_choice_functions"))
      if (!e.updated_choices.emplace(agent, std::move(spec)).second)
        throw InputError("two updated choice functions for agent '" + agent + "'");
  }
  return e;
}

std::vector<ContractId> parse_id_list(std::string_view text) {
  const json j = parse_json(text);
  return as<std::vector<ContractId>>(j, "contract id list");
}

std::string market_to_json(const Market& market, int indent) {
  const auto& net = market.network();
  json contracts = json::array();
  for (const auto& c : net.contracts()) contracts.push_back(contract_json(c));
  json cfs = json::array();
  for (AgentIndex f = 0; f < net.agent_count(); ++f) {
    if (!market.spec(f))
      throw InputError("agent '" + net.agents()[f] + "' has no family description to serialize");
    cfs.push_back(spec_json(*market.spec(f), net.agents()[f]));
  }
  return json{{"agents", net.agents()}, {"contracts", contracts}, {"choice_functions", cfs}}.dump(indent);
}

std::string priced_to_json(const PricedDescription& d, int indent) {
  json o = json::object();
  if (!d.agents.empty()) o["agents"] = d.agents;
  json trades = json::array();
  for (const auto& t : d.trades)
    trades.push_back({{"id", t.id}, {"seller", t.seller}, {"buyer", t.buyer},
                      {"price_min", t.price_min}, {"price_max", t.price_max}});
  o["trades"] = trades;
  json cfs = json::array();
  for (const auto& [agent, spec] : d.choice_functions) cfs.push_back(spec_json(spec, agent));
  o["choice_functions"] = cfs;
  return o.dump(indent);
}

std::string entry_to_json(const EntryEvent& e, int indent) {
  json contracts = json::array();
  for (const auto& c : e.contracts) contracts.push_back(contract_json(c));
  json o = {{"agent", e.new_agent},
            {"side", e.side == EntrySide::terminal_seller ? "terminal_seller" : "terminal_buyer"},
            {"contracts", contracts},
            {"choice_function", spec_json(e.choice, std::nullopt)}};
  if (!e.updated_choices.empty()) {
    json up = json::array();
    for (const auto& [agent, spec] : e.updated_choices) up.push_back(spec_json(spec, agent));
    o["updated_choice_functions"] = up;
  }
  return o.dump(indent);
}

}  // namespace trailnet
