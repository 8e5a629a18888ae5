#include "lexssp/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bundled_scenarios.hpp"
#include "lexssp/errors.hpp"
#include "lexssp/fltl.hpp"
#include "lexssp/translate.hpp"

namespace lexssp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
  // An empty pointer means the whole document; a bare message reads better
  // than a dangling separator.
  throw InputError(ptr.empty() ? msg : ptr + ": " + msg);
}

const json& require(const json& j, const char* key, const std::string& ptr) {
  auto it = j.find(key);
  if (it == j.end()) fail(ptr, std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<int>();
}

Cell parse_cell_key(const std::string& key, const std::string& ptr) {
  auto comma = key.find(',');
  if (comma == std::string::npos) fail(ptr, "cell keys have the form 'col,row'");
  try {
    std::size_t usedA = 0, usedB = 0;
    int c = std::stoi(key.substr(0, comma), &usedA);
    int r = std::stoi(key.substr(comma + 1), &usedB);
    if (usedA != comma || usedB != key.size() - comma - 1)
      fail(ptr, "cell keys have the form 'col,row'");
    return {c, r};
  } catch (const InputError&) {
    throw;
  } catch (const std::exception&) {
    fail(ptr, "cell keys have the form 'col,row'");
  }
}

GridScenario grid_from_json(const json& j) {
  if (!j.is_object()) fail("/grid", "expected an object");
  GridScenario g;
  g.width = get_int(require(j, "width", "/grid"), "/grid/width");
  g.height = get_int(require(j, "height", "/grid"), "/grid/height");
  if (auto it = j.find("blocked"); it != j.end()) {
    if (!it->is_array()) fail("/grid/blocked", "expected an array");
    int i = 0;
    for (const auto& b : *it) {
      std::string ptr = "/grid/blocked/" + std::to_string(i++);
      if (!b.is_array() || b.size() != 2) fail(ptr, "expected a [col, row] pair");
      g.blocked.insert({get_int(b[0], ptr + "/0"), get_int(b[1], ptr + "/1")});
    }
  }
  if (auto it = j.find("names"); it != j.end()) {
    if (!it->is_object()) fail("/grid/names", "expected an object");
    for (const auto& [key, val] : it->items()) {
      std::string ptr = "/grid/names/" + key;
      g.names[parse_cell_key(key, ptr)] = get_string(val, ptr);
    }
  }
  auto costMap = [&](const char* key, std::map<std::string, double>& out,
                     double& def, bool& has) {
    auto it = j.find(key);
    if (it == j.end()) return;
    has = true;
    std::string base = std::string("/grid/") + key;
    if (!it->is_object()) fail(base, "expected an object");
    for (const auto& [name, val] : it->items()) {
      double c = get_number(val, base + "/" + name);
      if (name == "default")
        def = c;
      else
        out[name] = c;
    }
  };
  costMap("max_cost", g.maxCostMap, g.maxCostDefault, g.hasMaxObjective);
  costMap("sum_cost", g.sumCostMap, g.sumCostDefault, g.hasSumObjective);
  g.start = get_string(require(j, "start", "/grid"), "/grid/start");
  g.goal = get_string(require(j, "goal", "/grid"), "/grid/goal");
  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_object()) fail("/grid/labels", "expected an object");
    for (const auto& [name, arr] : it->items()) {
      std::string ptr = "/grid/labels/" + name;
      if (!arr.is_array()) fail(ptr, "expected an array");
      std::vector<std::string> props;
      for (std::size_t i = 0; i < arr.size(); ++i)
        props.push_back(get_string(arr[i], ptr + "/" + std::to_string(i)));
      g.labels[name] = std::move(props);
    }
  }
  return g;
}

json grid_to_json(const GridScenario& g) {
  json j;
  j["width"] = g.width;
  j["height"] = g.height;
  j["blocked"] = json::array();
  for (Cell c : g.blocked) j["blocked"].push_back(json::array({c.first, c.second}));
  if (!g.names.empty()) {
    json names = json::object();
    for (const auto& [cell, name] : g.names)
      names[std::to_string(cell.first) + "," + std::to_string(cell.second)] = name;
    j["names"] = std::move(names);
  }
  if (g.hasMaxObjective) {
    json m = json::object();
    m["default"] = g.maxCostDefault;
    for (const auto& [name, c] : g.maxCostMap) m[name] = c;
    j["max_cost"] = std::move(m);
  }
  if (g.hasSumObjective) {
    json m = json::object();
    m["default"] = g.sumCostDefault;
    for (const auto& [name, c] : g.sumCostMap) m[name] = c;
    j["sum_cost"] = std::move(m);
  }
  j["start"] = g.start;
  j["goal"] = g.goal;
  if (!g.labels.empty()) {
    json labels = json::object();
    for (const auto& [name, props] : g.labels) labels[name] = props;
    j["labels"] = std::move(labels);
  }
  return j;
}

void explicit_from_json(const json& j, Scenario& sc) {
  const json& jStates = require(j, "states", "");
  const json& jActions = require(j, "actions", "");
  if (!jStates.is_array() || jStates.empty()) fail("/states", "expected a nonempty array");
  if (!jActions.is_array() || jActions.empty())
    fail("/actions", "expected a nonempty array");

  StochasticTransitionSystem& sys = sc.system;
  std::map<std::string, StateId> stateIdx;
  std::map<std::string, ActionId> actionIdx;
  for (std::size_t i = 0; i < jStates.size(); ++i) {
    std::string name = get_string(jStates[i], "/states/" + std::to_string(i));
    if (!stateIdx.emplace(name, static_cast<StateId>(i)).second)
      fail("/states/" + std::to_string(i), "duplicate state '" + name + "'");
    sys.states.push_back(name);
  }
  for (std::size_t i = 0; i < jActions.size(); ++i) {
    std::string name = get_string(jActions[i], "/actions/" + std::to_string(i));
    if (!actionIdx.emplace(name, static_cast<ActionId>(i)).second)
      fail("/actions/" + std::to_string(i), "duplicate action '" + name + "'");
    sys.actions.push_back(name);
  }
  auto stateOf = [&](const json& v, const std::string& ptr) {
    std::string name = get_string(v, ptr);
    auto it = stateIdx.find(name);
    if (it == stateIdx.end()) fail(ptr, "unknown state '" + name + "'");
    return it->second;
  };
  auto actionOf = [&](const json& v, const std::string& ptr) {
    std::string name = get_string(v, ptr);
    auto it = actionIdx.find(name);
    if (it == actionIdx.end()) fail(ptr, "unknown action '" + name + "'");
    return it->second;
  };

  sys.delta.assign(sys.states.size(), {});
  for (auto& row : sys.delta) row.resize(sys.actions.size());
  sys.target.assign(sys.states.size(), 0);
  sys.labels.assign(sys.states.size(), {});

  const json& jTrans = require(j, "transitions", "");
  if (!jTrans.is_array()) fail("/transitions", "expected an array");
  for (std::size_t i = 0; i < jTrans.size(); ++i) {
    std::string ptr = "/transitions/" + std::to_string(i);
    const json& t = jTrans[i];
    if (!t.is_object()) fail(ptr, "expected an object");
    StateId from = stateOf(require(t, "from", ptr), ptr + "/from");
    ActionId a = actionOf(require(t, "action", ptr), ptr + "/action");
    StateId to = stateOf(require(t, "to", ptr), ptr + "/to");
    double p = get_number(require(t, "p", ptr), ptr + "/p");
    sys.delta[from][a].push_back({to, p});
  }

  const json& jTargets = require(j, "targets", "");
  if (!jTargets.is_array()) fail("/targets", "expected an array");
  for (std::size_t i = 0; i < jTargets.size(); ++i)
    sys.target[stateOf(jTargets[i], "/targets/" + std::to_string(i))] = 1;

  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_object()) fail("/labels", "expected an object");
    for (const auto& [name, arr] : it->items()) {
      std::string ptr = "/labels/" + name;
      auto sIt = stateIdx.find(name);
      if (sIt == stateIdx.end()) fail(ptr, "unknown state '" + name + "'");
      if (!arr.is_array()) fail(ptr, "expected an array");
      std::vector<std::string> props;
      for (std::size_t i = 0; i < arr.size(); ++i)
        props.push_back(get_string(arr[i], ptr + "/" + std::to_string(i)));
      std::sort(props.begin(), props.end());
      props.erase(std::unique(props.begin(), props.end()), props.end());
      sys.labels[sIt->second] = std::move(props);
    }
  }

  sys.admissible.assign(sys.states.size(), {});
  for (StateId s = 0; s < sys.num_states(); ++s)
    for (ActionId a = 0; a < sys.num_actions(); ++a)
      if (!sys.delta[s][a].empty()) sys.admissible[s].push_back(a);

  if (auto it = j.find("admissible"); it != j.end()) {
    if (!it->is_object()) fail("/admissible", "expected an object");
    for (const auto& [name, arr] : it->items()) {
      std::string ptr = "/admissible/" + name;
      auto sIt = stateIdx.find(name);
      if (sIt == stateIdx.end()) fail(ptr, "unknown state '" + name + "'");
      if (!arr.is_array()) fail(ptr, "expected an array");
      std::set<ActionId> declared;
      for (std::size_t i = 0; i < arr.size(); ++i)
        declared.insert(actionOf(arr[i], ptr + "/" + std::to_string(i)));
      std::set<ActionId> derived(sys.admissible[sIt->second].begin(),
                                 sys.admissible[sIt->second].end());
      if (declared != derived)
        fail(ptr, "admissible set disagrees with the declared transitions");
    }
  }

  const json& jObj = require(j, "objectives", "");
  if (!jObj.is_array() || jObj.empty())
    fail("/objectives", "expected a nonempty array");
  for (std::size_t k = 0; k < jObj.size(); ++k) {
    std::string ptr = "/objectives/" + std::to_string(k);
    const json& o = jObj[k];
    if (!o.is_object()) fail(ptr, "expected an object");
    Objective obj;
    std::string agg = get_string(require(o, "aggregation", ptr), ptr + "/aggregation");
    if (agg == "max")
      obj.aggregation = Aggregation::Max;
    else if (agg == "sum")
      obj.aggregation = Aggregation::Sum;
    else
      fail(ptr + "/aggregation", "expected \"max\" or \"sum\"");
    if (auto it = o.find("default_cost"); it != o.end())
      obj.defaultCost = get_number(*it, ptr + "/default_cost");
    if (auto it = o.find("costs"); it != o.end()) {
      if (!it->is_array()) fail(ptr + "/costs", "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        std::string cptr = ptr + "/costs/" + std::to_string(i);
        const json& c = (*it)[i];
        if (!c.is_object()) fail(cptr, "expected an object");
        obj.set_cost(stateOf(require(c, "from", cptr), cptr + "/from"),
                     actionOf(require(c, "action", cptr), cptr + "/action"),
                     stateOf(require(c, "to", cptr), cptr + "/to"),
                     get_number(require(c, "c", cptr), cptr + "/c"));
      }
    }
    sc.costs.objectives.push_back(std::move(obj));
  }

  sc.start = get_string(require(j, "start", ""), "/start");
  if (!stateIdx.count(sc.start)) fail("/start", "unknown state '" + sc.start + "'");
}

json explicit_to_json(const Scenario& sc) {
  const StochasticTransitionSystem& sys = sc.system;
  json j;
  j["states"] = sys.states;
  j["actions"] = sys.actions;
  json adm = json::object();
  for (StateId s = 0; s < sys.num_states(); ++s) {
    json arr = json::array();
    for (ActionId a : sys.admissible[s]) arr.push_back(sys.actions[a]);
    adm[sys.states[s]] = std::move(arr);
  }
  j["admissible"] = std::move(adm);
  json trans = json::array();
  for (StateId s = 0; s < sys.num_states(); ++s)
    for (ActionId a : sys.admissible[s])
      for (const auto& tr : sys.successors(s, a)) {
        json t;
        t["from"] = sys.states[s];
        t["action"] = sys.actions[a];
        t["to"] = sys.states[tr.to];
        t["p"] = tr.p;
        trans.push_back(std::move(t));
      }
  j["transitions"] = std::move(trans);
  json targets = json::array();
  for (StateId s = 0; s < sys.num_states(); ++s)
    if (sys.target[s]) targets.push_back(sys.states[s]);
  j["targets"] = std::move(targets);
  json labels = json::object();
  for (StateId s = 0; s < sys.num_states(); ++s)
    if (!sys.labels[s].empty()) labels[sys.states[s]] = sys.labels[s];
  if (!labels.empty()) j["labels"] = std::move(labels);

  json objectives = json::array();
  for (const auto& obj : sc.costs.objectives) {
    json o;
    o["aggregation"] = obj.aggregation == Aggregation::Max ? "max" : "sum";
    o["default_cost"] = obj.defaultCost;
    std::vector<std::tuple<StateId, ActionId, StateId, double>> entries;
    for (const auto& [key, c] : obj.overrides)
      entries.emplace_back(static_cast<StateId>(key >> 40),
                           static_cast<ActionId>((key >> 20) & 0xFFFFF),
                           static_cast<StateId>(key & 0xFFFFF), c);
    std::sort(entries.begin(), entries.end());
    json costs = json::array();
    for (const auto& [s, a, to, c] : entries) {
      json e;
      e["from"] = sys.states[s];
      e["action"] = sys.actions[a];
      e["to"] = sys.states[to];
      e["c"] = c;
      costs.push_back(std::move(e));
    }
    if (!costs.empty()) o["costs"] = std::move(costs);
    objectives.push_back(std::move(o));
  }
  j["objectives"] = std::move(objectives);
  j["start"] = sc.start;
  return j;
}

std::vector<std::string> scenario_ap(const Scenario& sc) {
  std::set<std::string> props;
  for (const auto& l : sc.system.labels)
    for (const auto& p : l) props.insert(p);
  return {props.begin(), props.end()};
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("", "expected a top-level object");

  Scenario sc;
  if (auto it = j.find("grid"); it != j.end()) {
    GridScenario g = grid_from_json(*it);
    GridBuild build = build_grid_system(g);
    sc.system = std::move(build.sys);
    sc.costs = std::move(build.costs);
    sc.start = g.start;
    sc.grid = std::move(g);
  } else {
    explicit_from_json(j, sc);
  }
  if (auto it = j.find("horizon"); it != j.end())
    sc.horizon = get_int(*it, "/horizon");
  if (auto it = j.find("c_fail"); it != j.end())
    sc.cFail = get_number(*it, "/c_fail");
  if (auto it = j.find("epsilon"); it != j.end())
    sc.epsilon = get_number(*it, "/epsilon");
  if (auto it = j.find("formula"); it != j.end())
    sc.formula = get_string(*it, "/formula");
  return sc;
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  if (sc.grid) {
    j["grid"] = grid_to_json(*sc.grid);
  } else {
    j = explicit_to_json(sc);
  }
  j["horizon"] = sc.horizon;
  j["c_fail"] = sc.cFail;
  if (sc.epsilon) j["epsilon"] = *sc.epsilon;
  if (sc.formula) j["formula"] = *sc.formula;
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return scenario_from_json(buf.str());
  } catch (const InputError& e) {
    std::string msg = e.what();
    throw InputError(msg.rfind('/', 0) == 0 ? path + msg : path + ": " + msg);
  }
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError(path + ": cannot open file for writing");
  out << scenario_to_json(sc);
}

std::vector<Diagnostic> validate_scenario(const Scenario& sc) {
  std::vector<Diagnostic> out = validate_system(sc.system);
  auto costDiags = validate_costs(sc.system, sc.costs);
  out.insert(out.end(), costDiags.begin(), costDiags.end());
  if (sc.costs.size() == 0)
    out.push_back({"objectives", "at least one objective is required"});
  if (sc.horizon < 1) out.push_back({"horizon", "must be a positive integer"});
  if (!(sc.cFail > 0.0)) out.push_back({"c_fail", "must be positive"});
  if (sc.epsilon && *sc.epsilon < 0.0)
    out.push_back({"epsilon", "must be nonnegative"});
  bool startKnown = false;
  for (const auto& name : sc.system.states) startKnown |= (name == sc.start);
  if (!startKnown) out.push_back({"start", "unknown state '" + sc.start + "'"});
  if (sc.formula) {
    try {
      parse_fltl(*sc.formula, scenario_ap(sc));
    } catch (const InputError& e) {
      out.push_back({"formula", e.what()});
    }
  }
  if (sc.grid) {
    auto gridDiags = validate_grid(*sc.grid);
    out.insert(out.end(), gridDiags.begin(), gridDiags.end());
  }
  return out;
}

Scenario experiment_1_scenario() {
  return scenario_from_json(bundled::kExperiment1Json);
}

Scenario experiment_2_scenario() {
  return scenario_from_json(bundled::kExperiment2Json);
}

CompiledScenario compile_scenario(const Scenario& sc) {
  CompiledScenario out;
  out.cfg.horizon = sc.horizon;
  out.cfg.cFail = sc.cFail;
  out.cfg.epsilon = sc.epsilon;
  StateId s0 = sc.system.state_index(sc.start);
  if (sc.formula) {
    std::vector<std::string> ap = scenario_ap(sc);
    FltlPtr f = parse_fltl(*sc.formula, ap);
    Dfa dfa = add_rejecting_sink(to_dfa(f, ap));
    out.prod = build_product(sc.system, sc.costs, dfa, s0);
  } else {
    out.prod = build_target_product(sc.system, sc.costs, s0);
  }
  return out;
}

SolvedScenario solve_scenario(const Scenario& sc) {
  CompiledScenario c = compile_scenario(sc);
  SolvedScenario out;
  out.prod = std::move(c.prod);
  out.cfg = c.cfg;
  out.sol = solve_lexicographic(out.prod, out.cfg);
  return out;
}

}  // namespace lexssp
