#include "lexssp/product.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "lexssp/errors.hpp"

namespace lexssp {

namespace {

Letter state_letter(const StochasticTransitionSystem& sys, StateId s,
                    const std::vector<std::string>& ap) {
  // Labels outside the DFA's AP set are invisible to the monitor.
  Letter letter = 0;
  for (const auto& p : sys.labels[s]) {
    for (std::size_t i = 0; i < ap.size(); ++i)
      if (ap[i] == p) letter |= Letter{1} << i;
  }
  return letter;
}

}  // namespace

ProductSystem build_product(const StochasticTransitionSystem& sys,
                            const CostSpec& costs, const Dfa& dfa, StateId s0) {
  if (!dfa.is_total())
    throw InputError(
        "product construction needs a total DFA; complete it with "
        "add_rejecting_sink first");
  if (s0 < 0 || s0 >= sys.num_states()) throw InputError("start state out of range");

  ProductSystem prod;
  prod.dfa = dfa;
  prod.numBase_ = sys.num_states();
  prod.numQ_ = dfa.numStates;
  prod.pairIndex_.assign(static_cast<std::size_t>(prod.numBase_) * prod.numQ_, -1);
  prod.sys.actions = sys.actions;

  auto intern = [&](StateId base, int q) {
    std::size_t slot = static_cast<std::size_t>(base) * prod.numQ_ + q;
    if (prod.pairIndex_[slot] >= 0) return prod.pairIndex_[slot];
    StateId id = static_cast<StateId>(prod.baseOf.size());
    prod.pairIndex_[slot] = id;
    prod.baseOf.push_back(base);
    prod.qOf.push_back(q);
    prod.rejecting.push_back(dfa.sink && *dfa.sink == q ? 1 : 0);
    prod.sys.states.push_back(sys.states[base] + "@q" + std::to_string(q));
    prod.sys.target.push_back(dfa.accepting[q]);
    prod.sys.labels.push_back(sys.labels[base]);
    return id;
  };

  // The initial base label is read before the first decision.
  int q0 = dfa.trans[dfa.initial][state_letter(sys, s0, dfa.ap)];
  prod.initial = intern(s0, q0);

  std::deque<StateId> queue = {prod.initial};
  while (!queue.empty()) {
    StateId x = queue.front();
    queue.pop_front();
    StateId base = prod.baseOf[x];
    int q = prod.qOf[x];
    if (prod.sys.delta.size() <= static_cast<std::size_t>(x))
      prod.sys.delta.resize(x + 1);
    prod.sys.delta[x].assign(sys.num_actions(), {});
    if (prod.sys.target[x]) continue;  // terminal: no outgoing edges

    for (ActionId a : sys.admissible[base]) {
      auto& row = prod.sys.delta[x][a];
      for (const auto& tr : sys.successors(base, a)) {
        int q2 = dfa.trans[q][state_letter(sys, tr.to, dfa.ap)];
        std::size_t slot = static_cast<std::size_t>(tr.to) * prod.numQ_ + q2;
        bool fresh = prod.pairIndex_[slot] < 0;
        StateId y = intern(tr.to, q2);
        if (fresh) queue.push_back(y);
        row.push_back({y, tr.p});
      }
    }
  }
  prod.sys.delta.resize(prod.sys.states.size());
  for (auto& row : prod.sys.delta) row.resize(sys.num_actions());

  prod.sys.admissible.assign(prod.sys.states.size(), {});
  for (StateId x = 0; x < prod.sys.num_states(); ++x)
    for (ActionId a = 0; a < prod.sys.num_actions(); ++a)
      if (!prod.sys.delta[x][a].empty()) prod.sys.admissible[x].push_back(a);

  // Edge costs depend only on the base coordinates.
  prod.costs.objectives.reserve(costs.objectives.size());
  for (const auto& obj : costs.objectives) {
    Objective lifted;
    lifted.aggregation = obj.aggregation;
    lifted.defaultCost = obj.defaultCost;
    for (StateId x = 0; x < prod.sys.num_states(); ++x)
      for (ActionId a : prod.sys.admissible[x])
        for (const auto& tr : prod.sys.successors(x, a)) {
          double c = obj.cost(prod.baseOf[x], a, prod.baseOf[tr.to]);
          if (c != obj.defaultCost) lifted.set_cost(x, a, tr.to, c);
        }
    prod.costs.objectives.push_back(std::move(lifted));
  }
  return prod;
}

ProductSystem build_target_product(const StochasticTransitionSystem& sys,
                                   const CostSpec& costs, StateId s0) {
  Dfa monitor;
  monitor.ap = {"__goal"};
  monitor.numStates = 2;
  monitor.initial = 0;
  monitor.trans = {{0, 1}, {1, 1}};
  monitor.accepting = {0, 1};

  StochasticTransitionSystem tagged = sys;
  for (StateId s = 0; s < sys.num_states(); ++s)
    if (sys.target[s]) {
      auto& l = tagged.labels[s];
      l.insert(std::upper_bound(l.begin(), l.end(), "__goal"), "__goal");
    }
  return build_product(tagged, costs, monitor, s0);
}

double satisfaction_probability(
    const ProductSystem& prod, int horizon, const PolicyMemory& memory,
    const std::function<ActionId(int h, StateId x, int mem)>& policy) {
  if (horizon < 0) throw InputError("horizon must be nonnegative");
  int n = prod.sys.num_states();
  int M = memory.size;
  std::vector<double> prev(static_cast<std::size_t>(n) * M, 0.0);
  std::vector<double> cur(prev.size(), 0.0);
  auto pin_targets = [&](std::vector<double>& v) {
    for (StateId x = 0; x < n; ++x)
      if (prod.sys.target[x])
        for (int m = 0; m < M; ++m) v[static_cast<std::size_t>(x) * M + m] = 1.0;
  };
  pin_targets(prev);
  for (int h = 1; h <= horizon; ++h) {
    std::fill(cur.begin(), cur.end(), 0.0);
    pin_targets(cur);
    for (StateId x = 0; x < n; ++x) {
      if (prod.sys.target[x]) continue;
      for (int m = 0; m < M; ++m) {
        ActionId a = policy(h, x, m);
        if (a < 0 || !prod.sys.is_admissible(x, a)) continue;  // stuck: 0
        double p = 0.0;
        for (const auto& tr : prod.sys.successors(x, a)) {
          int m2 = memory.update ? memory.update(m, x, a, tr.to) : m;
          p += tr.p * prev[static_cast<std::size_t>(tr.to) * M + m2];
        }
        cur[static_cast<std::size_t>(x) * M + m] = p;
      }
    }
    prev.swap(cur);
  }
  return prev[static_cast<std::size_t>(prod.initial) * M + memory.initial];
}

double satisfaction_probability(const ProductSystem& prod, int horizon,
                                const std::function<ActionId(StateId x)>& policy) {
  PolicyMemory mem;
  mem.size = 1;
  mem.initial = 0;
  return satisfaction_probability(
      prod, horizon, mem, [&](int, StateId x, int) { return policy(x); });
}

}  // namespace lexssp
