#include "lexssp/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexssp/errors.hpp"

namespace lexssp {

StateId StochasticTransitionSystem::state_index(const std::string& name) const {
  for (StateId i = 0; i < num_states(); ++i)
    if (states[i] == name) return i;
  throw InputError("unknown state: " + name);
}

ActionId StochasticTransitionSystem::action_index(const std::string& name) const {
  for (ActionId i = 0; i < num_actions(); ++i)
    if (actions[i] == name) return i;
  throw InputError("unknown action: " + name);
}

StateId SystemBuilder::state(const std::string& name) {
  auto it = stateIdx_.find(name);
  if (it != stateIdx_.end()) return it->second;
  StateId id = static_cast<StateId>(sys_.states.size());
  sys_.states.push_back(name);
  sys_.labels.emplace_back();
  sys_.target.push_back(0);
  stateIdx_.emplace(name, id);
  return id;
}

ActionId SystemBuilder::action(const std::string& name) {
  auto it = actionIdx_.find(name);
  if (it != actionIdx_.end()) return it->second;
  ActionId id = static_cast<ActionId>(sys_.actions.size());
  sys_.actions.push_back(name);
  actionIdx_.emplace(name, id);
  return id;
}

void SystemBuilder::transition(const std::string& from, const std::string& act,
                               const std::string& to, double p) {
  StateId s = state(from), t = state(to);
  ActionId a = action(act);
  if (sys_.delta.size() < sys_.states.size()) sys_.delta.resize(sys_.states.size());
  auto& row = sys_.delta[s];
  if (row.size() < sys_.actions.size()) row.resize(sys_.actions.size());
  row[a].push_back({t, p});
}

void SystemBuilder::set_target(const std::string& name) { sys_.target[state(name)] = 1; }

void SystemBuilder::label(const std::string& st, const std::string& ap) {
  StateId s = state(st);
  auto& l = sys_.labels[s];
  if (std::find(l.begin(), l.end(), ap) == l.end()) l.push_back(ap);
}

StochasticTransitionSystem SystemBuilder::build() {
  sys_.delta.resize(sys_.states.size());
  for (auto& row : sys_.delta) row.resize(sys_.actions.size());
  sys_.admissible.assign(sys_.states.size(), {});
  for (StateId s = 0; s < sys_.num_states(); ++s) {
    for (ActionId a = 0; a < sys_.num_actions(); ++a)
      if (!sys_.delta[s][a].empty()) sys_.admissible[s].push_back(a);
    std::sort(sys_.labels[s].begin(), sys_.labels[s].end());
  }
  return sys_;
}

std::vector<Diagnostic> validate_system(const StochasticTransitionSystem& sys) {
  std::vector<Diagnostic> out;
  auto add = [&out](std::string loc, std::string msg) {
    out.push_back({std::move(loc), std::move(msg)});
  };

  int n = sys.num_states();
  int m = sys.num_actions();
  if (static_cast<int>(sys.delta.size()) != n || static_cast<int>(sys.target.size()) != n ||
      static_cast<int>(sys.admissible.size()) != n || static_cast<int>(sys.labels.size()) != n) {
    add("system", "internal arrays disagree on the number of states");
    return out;
  }

  bool anyTarget = false;
  for (StateId s = 0; s < n; ++s) anyTarget |= (sys.target[s] != 0);
  if (!anyTarget) add("targets", "empty target set");

  for (StateId s = 0; s < n; ++s) {
    if (static_cast<int>(sys.delta[s].size()) != m) {
      add(sys.states[s], "transition row has wrong action count");
      continue;
    }
    bool anyAction = false;
    for (ActionId a = 0; a < m; ++a) {
      const auto& succ = sys.delta[s][a];
      if (succ.empty()) continue;
      anyAction = true;
      double total = 0.0;
      for (const auto& tr : succ) {
        if (tr.to < 0 || tr.to >= n)
          add(sys.states[s] + "/" + sys.actions[a], "transition to out-of-range state");
        if (!(tr.p > 0.0) || tr.p > 1.0)
          add(sys.states[s] + "/" + sys.actions[a],
              "transition probability outside (0, 1]");
        total += tr.p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "probability mass " << total << " != 1";
        add(sys.states[s] + "/" + sys.actions[a], msg.str());
      }
    }
    if (!anyAction) add(sys.states[s], "no admissible action");
  }
  return out;
}

std::vector<Diagnostic> validate_costs(const StochasticTransitionSystem& sys,
                                       const CostSpec& spec) {
  std::vector<Diagnostic> out;
  for (int k = 0; k < spec.size(); ++k) {
    const auto& obj = spec.objectives[k];
    std::string loc = "objectives[" + std::to_string(k) + "]";
    bool defaultUsed = false;
    for (StateId s = 0; s < sys.num_states() && !defaultUsed; ++s)
      for (ActionId a : sys.admissible[s])
        for (const auto& tr : sys.successors(s, a))
          if (!obj.overrides.count(Objective::key(s, a, tr.to))) {
            defaultUsed = true;
            break;
          }
    if (defaultUsed && !(obj.defaultCost > 0.0))
      out.push_back({loc, "default cost must be strictly positive"});
    for (const auto& [key, c] : obj.overrides)
      if (!(c > 0.0)) out.push_back({loc, "cost values must be strictly positive"});
  }
  return out;
}

double trajectory_probability(const Trajectory& traj, const StochasticPolicy& policy,
                              const StochasticTransitionSystem& sys) {
  if (traj.states.empty()) throw InputError("empty trajectory");
  if (traj.actions.size() + 1 != traj.states.size())
    throw InputError("trajectory has mismatched state/action counts");
  double p = 1.0;
  for (std::size_t t = 0; t < traj.actions.size(); ++t) {
    StateId s = traj.states[t];
    StateId next = traj.states[t + 1];
    ActionId a = traj.actions[t];
    if (s < 0 || s >= sys.num_states() || next < 0 || next >= sys.num_states())
      throw InputError("trajectory references unknown state");
    if (a < 0 || a >= sys.num_actions())
      throw InputError("trajectory references unknown action");

    double pa = 0.0;
    if (auto it = policy.probs.find(s); it != policy.probs.end())
      for (const auto& [act, prob] : it->second)
        if (act == a) pa += prob;

    double pt = 0.0;
    for (const auto& tr : sys.successors(s, a))
      if (tr.to == next) pt += tr.p;

    p *= pa * pt;
    if (p == 0.0) return 0.0;
  }
  return p;
}

std::vector<double> evaluate_trajectory_costs(const Trajectory& traj,
                                              const CostSpec& spec,
                                              const StochasticTransitionSystem& sys,
                                              MaxCostRange range) {
  if (!traj.hittingTime.has_value())
    throw InputError("trajectory did not reach the target set");
  (void)sys;
  std::vector<double> out(spec.size(), 0.0);
  std::size_t steps = traj.actions.size();
  for (int k = 0; k < spec.size(); ++k) {
    const auto& obj = spec.objectives[k];
    std::size_t last = steps;
    if (obj.aggregation == Aggregation::Max && range == MaxCostRange::ExcludeFinal &&
        last > 0)
      --last;
    double acc = 0.0;
    for (std::size_t t = 0; t < last; ++t) {
      double c = obj.cost(traj.states[t], traj.actions[t], traj.states[t + 1]);
      if (obj.aggregation == Aggregation::Sum)
        acc += c;
      else
        acc = std::max(acc, c);
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace lexssp
