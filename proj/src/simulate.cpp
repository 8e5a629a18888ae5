#include "lexssp/simulate.hpp"

#include <cmath>
#include <limits>

#include "lexssp/errors.hpp"

namespace lexssp {

namespace {

ActionId sample_action(const StochasticPolicy& policy, std::int64_t decisionState,
                       Rng& rng) {
  auto it = policy.probs.find(decisionState);
  if (it == policy.probs.end() || it->second.empty())
    throw InputError("policy has no action at decision state " +
                     std::to_string(decisionState));
  double u = rng.next_double();
  double acc = 0.0;
  for (const auto& [a, p] : it->second) {
    acc += p;
    if (u < acc) return a;
  }
  return it->second.back().first;  // u landed in roundoff tail
}

StateId sample_successor(const std::vector<Transition>& succ, Rng& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (const auto& tr : succ) {
    acc += tr.p;
    if (u < acc) return tr.to;
  }
  return succ.back().to;
}

}  // namespace

Trajectory sample_trajectory(const StochasticTransitionSystem& sys,
                             const StochasticPolicy& policy,
                             DecisionAdapter& adapter, StateId s0,
                             std::uint64_t rngSeed, int stepCap) {
  if (s0 < 0 || s0 >= sys.num_states()) throw InputError("start state out of range");
  Rng rng(rngSeed);
  Trajectory traj;
  traj.states.push_back(s0);
  adapter.reset(s0);
  StateId s = s0;
  for (int step = 0; step < stepCap; ++step) {
    if (sys.target[s]) {
      traj.hittingTime = step;
      return traj;
    }
    ActionId a = sample_action(policy, adapter.current(), rng);
    const auto& succ = sys.successors(s, a);
    if (succ.empty())
      throw InputError("policy chose inadmissible action " + sys.actions[a] +
                       " in state " + sys.states[s]);
    StateId next = sample_successor(succ, rng);
    adapter.advance(a, next);
    traj.actions.push_back(a);
    traj.states.push_back(next);
    s = next;
  }
  if (sys.target[s]) traj.hittingTime = static_cast<int>(traj.actions.size());
  return traj;
}

MonteCarloStats expected_cost_monte_carlo(const StochasticTransitionSystem& sys,
                                          const StochasticPolicy& policy,
                                          const CostSpec& spec, StateId s0,
                                          int nSamples, std::uint64_t rngSeed,
                                          int stepCap) {
  if (nSamples <= 0) throw InputError("nSamples must be positive");
  MonteCarloStats st;
  st.samples = nSamples;
  int k = spec.size();
  std::vector<double> sum(k, 0.0), sumSq(k, 0.0);
  for (int i = 0; i < nSamples; ++i) {
    IdentityAdapter adapter;
    Trajectory traj = sample_trajectory(sys, policy, adapter, s0,
                                        derive_seed(rngSeed, i), stepCap);
    if (!traj.hittingTime.has_value()) continue;
    ++st.completed;
    auto costs = evaluate_trajectory_costs(traj, spec, sys);
    for (int j = 0; j < k; ++j) {
      sum[j] += costs[j];
      sumSq[j] += costs[j] * costs[j];
    }
  }
  st.completionRate = static_cast<double>(st.completed) / nSamples;
  st.mean.assign(k, std::numeric_limits<double>::quiet_NaN());
  st.stderror.assign(k, std::numeric_limits<double>::quiet_NaN());
  if (st.completed > 0) {
    for (int j = 0; j < k; ++j) {
      double m = sum[j] / st.completed;
      st.mean[j] = m;
      if (st.completed > 1) {
        double var = (sumSq[j] - st.completed * m * m) / (st.completed - 1);
        st.stderror[j] = std::sqrt(std::max(0.0, var) / st.completed);
      }
    }
  }
  return st;
}

}  // namespace lexssp
