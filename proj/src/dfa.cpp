#include "lexssp/dfa.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lexssp/errors.hpp"

namespace lexssp {

bool Dfa::is_total() const {
  for (int q = 0; q < numStates; ++q)
    for (int l = 0; l < num_letters(); ++l)
      if (trans[q][l] < 0) return false;
  return true;
}

bool Dfa::accepts(const Word& word) const {
  int q = initial;
  for (Letter sigma : word) {
    if (sigma >= static_cast<Letter>(num_letters()))
      throw InputError("letter outside the DFA alphabet");
    q = trans[q][sigma];
    if (q < 0) return false;
  }
  return accepting[q] != 0;
}

std::optional<int> find_rejecting_sink(const Dfa& d) {
  std::optional<int> found;
  for (int q = 0; q < d.numStates; ++q) {
    if (d.accepting[q]) continue;
    bool absorbing = true;
    for (int l = 0; l < d.num_letters() && absorbing; ++l)
      absorbing = (d.trans[q][l] == q);
    if (absorbing) {
      if (found.has_value()) return std::nullopt;
      found = q;
    }
  }
  return found;
}

Dfa add_rejecting_sink(const Dfa& d, bool force) {
  bool total = d.is_total();
  if (total && !force) return d;
  Dfa out = d;
  int sink = out.numStates;
  out.numStates += 1;
  out.trans.emplace_back(out.num_letters(), sink);
  out.accepting.push_back(0);
  for (int q = 0; q < sink; ++q)
    for (int l = 0; l < out.num_letters(); ++l)
      if (out.trans[q][l] < 0) out.trans[q][l] = sink;
  out.sink = sink;
  return out;
}

Dfa minimize_dfa(const Dfa& d) {
  if (!d.is_total()) throw InputError("minimize_dfa requires a total DFA");
  int L = d.num_letters();

  // Reachable trim.
  std::vector<int> reach;
  std::vector<char> seen(d.numStates, 0);
  reach.push_back(d.initial);
  seen[d.initial] = 1;
  for (std::size_t i = 0; i < reach.size(); ++i)
    for (int l = 0; l < L; ++l) {
      int to = d.trans[reach[i]][l];
      if (!seen[to]) {
        seen[to] = 1;
        reach.push_back(to);
      }
    }

  // Moore refinement over reachable states: split classes by (class, letter
  // successors' classes) signatures until stable.
  std::vector<int> cls(d.numStates, -1);
  for (int q : reach) cls[q] = d.accepting[q] ? 1 : 0;
  int numCls = 2;
  {
    bool anyAcc = false, anyRej = false;
    for (int q : reach) (d.accepting[q] ? anyAcc : anyRej) = true;
    if (!anyAcc || !anyRej) {
      numCls = 1;
      for (int q : reach) cls[q] = 0;
    }
  }
  for (;;) {
    std::map<std::vector<int>, int> sig2new;
    std::vector<int> next(d.numStates, -1);
    for (int q : reach) {
      std::vector<int> sig;
      sig.reserve(L + 1);
      sig.push_back(cls[q]);
      for (int l = 0; l < L; ++l) sig.push_back(cls[d.trans[q][l]]);
      auto [it, inserted] = sig2new.emplace(std::move(sig), sig2new.size());
      (void)inserted;
      next[q] = it->second;
    }
    int n = static_cast<int>(sig2new.size());
    bool stable = (n == numCls);
    cls.swap(next);
    numCls = n;
    if (stable) break;
  }

  // Canonical renumbering: BFS over classes from the initial class, letters
  // in ascending order.
  std::vector<int> rep(numCls, -1);
  for (int q : reach)
    if (rep[cls[q]] < 0) rep[cls[q]] = q;
  std::vector<int> newId(numCls, -1);
  std::vector<int> order;
  newId[cls[d.initial]] = 0;
  order.push_back(cls[d.initial]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    int c = order[i];
    for (int l = 0; l < L; ++l) {
      int tc = cls[d.trans[rep[c]][l]];
      if (newId[tc] < 0) {
        newId[tc] = static_cast<int>(order.size());
        order.push_back(tc);
      }
    }
  }

  Dfa out;
  out.ap = d.ap;
  out.numStates = numCls;
  out.initial = 0;
  out.trans.assign(numCls, std::vector<int>(L, -1));
  out.accepting.assign(numCls, 0);
  for (int c : order) {
    int q = rep[c];
    int id = newId[c];
    out.accepting[id] = d.accepting[q];
    for (int l = 0; l < L; ++l) out.trans[id][l] = newId[cls[d.trans[q][l]]];
  }
  out.sink = find_rejecting_sink(out);
  return out;
}

std::string to_dot(const Dfa& d) {
  std::ostringstream os;
  os << "digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (int q = 0; q < d.numStates; ++q) {
    os << "  q" << q << " [shape=" << (d.accepting[q] ? "doublecircle" : "circle");
    if (d.sink && *d.sink == q) os << ", style=dashed";
    os << "];\n";
  }
  os << "  __start -> q" << d.initial << ";\n";
  // One edge per (from, to) pair listing its letters as prop sets.
  for (int q = 0; q < d.numStates; ++q) {
    std::map<int, std::vector<int>> byTarget;
    for (int l = 0; l < d.num_letters(); ++l)
      if (d.trans[q][l] >= 0) byTarget[d.trans[q][l]].push_back(l);
    for (const auto& [to, letters] : byTarget) {
      std::string label;
      for (int l : letters) {
        if (!label.empty()) label += "\\n";
        std::string props;
        for (std::size_t i = 0; i < d.ap.size(); ++i)
          if (l & (1 << i)) {
            if (!props.empty()) props += ",";
            props += d.ap[i];
          }
        label += "{" + props + "}";
      }
      os << "  q" << q << " -> q" << to << " [label=\"" << label << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string dfa_to_json(const Dfa& d) {
  nlohmann::ordered_json j;
  j["states"] = d.numStates;
  j["initial"] = d.initial;
  j["ap"] = d.ap;
  j["transitions"] = nlohmann::json::array();
  for (int q = 0; q < d.numStates; ++q)
    for (int l = 0; l < d.num_letters(); ++l) {
      if (d.trans[q][l] < 0) continue;
      std::vector<std::string> props;
      for (std::size_t i = 0; i < d.ap.size(); ++i)
        if (l & (1 << i)) props.push_back(d.ap[i]);
      j["transitions"].push_back(
          {{"from", q}, {"letter", props}, {"to", d.trans[q][l]}});
    }
  j["accepting"] = nlohmann::json::array();
  for (int q = 0; q < d.numStates; ++q)
    if (d.accepting[q]) j["accepting"].push_back(q);
  if (d.sink)
    j["sink"] = *d.sink;
  else
    j["sink"] = nullptr;
  return j.dump(2) + "\n";
}

Dfa dfa_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid DFA JSON: ") + e.what());
  }
  Dfa d;
  try {
    d.ap = j.at("ap").get<std::vector<std::string>>();
    if (static_cast<int>(d.ap.size()) > Dfa::kMaxAp)
      throw InputError("DFA exceeds the proposition cap");
    d.numStates = j.at("states").get<int>();
    d.initial = j.at("initial").get<int>();
    if (d.numStates <= 0) throw InputError("DFA needs at least one state");
    if (d.initial < 0 || d.initial >= d.numStates)
      throw InputError("DFA initial state out of range");
    d.trans.assign(d.numStates, std::vector<int>(d.num_letters(), -1));
    for (const auto& t : j.at("transitions")) {
      int from = t.at("from").get<int>();
      int to = t.at("to").get<int>();
      if (from < 0 || from >= d.numStates)
        throw InputError("DFA transition source out of range");
      if (to < 0 || to >= d.numStates)
        throw InputError("DFA transition target out of range");
      int letter = 0;
      for (const auto& p : t.at("letter")) {
        auto name = p.get<std::string>();
        auto it = std::find(d.ap.begin(), d.ap.end(), name);
        if (it == d.ap.end())
          throw InputError("DFA transition letter uses undeclared proposition '" +
                           name + "'");
        letter |= 1 << static_cast<int>(it - d.ap.begin());
      }
      if (d.trans[from][letter] >= 0 && d.trans[from][letter] != to)
        throw InputError("DFA has conflicting transitions for one state/letter pair");
      d.trans[from][letter] = to;
    }
    d.accepting.assign(d.numStates, 0);
    for (int q : j.at("accepting").get<std::vector<int>>()) {
      if (q < 0 || q >= d.numStates) throw InputError("accepting state out of range");
      d.accepting[q] = 1;
    }
    if (j.contains("sink") && !j.at("sink").is_null())
      d.sink = j.at("sink").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid DFA JSON: ") + e.what());
  }
  if (d.sink) {
    int q = *d.sink;
    bool ok = q >= 0 && q < d.numStates && !d.accepting[q];
    for (int l = 0; ok && l < d.num_letters(); ++l) ok = (d.trans[q][l] == q);
    if (!ok) throw InputError("designated sink is not a rejecting absorbing state");
  }
  return d;
}

}  // namespace lexssp
