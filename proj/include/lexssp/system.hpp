#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexssp {

using StateId = std::int32_t;
using ActionId = std::int32_t;

struct Transition {
  StateId to;
  double p;
};

// Finite MDP with a target set and a propositional labeling.
// Transitions are stored sparsely as successor lists per (state, action);
// delta[s][a] is empty exactly when a is not admissible in s.
struct StochasticTransitionSystem {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::vector<ActionId>> admissible;  // per state, ascending
  std::vector<std::vector<std::vector<Transition>>> delta;
  std::vector<char> target;                        // per state
  std::vector<std::vector<std::string>> labels;    // per state, sorted APs

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }

  StateId state_index(const std::string& name) const;    // throws InputError
  ActionId action_index(const std::string& name) const;  // throws InputError

  bool is_admissible(StateId s, ActionId a) const {
    return !delta[s][a].empty();
  }
  const std::vector<Transition>& successors(StateId s, ActionId a) const {
    return delta[s][a];
  }
};

// Convenience builder used by tests and the grid/scenario loaders.
class SystemBuilder {
 public:
  StateId state(const std::string& name);
  ActionId action(const std::string& name);
  void transition(const std::string& from, const std::string& action,
                  const std::string& to, double p);
  void set_target(const std::string& name);
  void label(const std::string& state, const std::string& ap);
  StochasticTransitionSystem build();

 private:
  StochasticTransitionSystem sys_;
  std::unordered_map<std::string, StateId> stateIdx_;
  std::unordered_map<std::string, ActionId> actionIdx_;
};

enum class Aggregation { Sum, Max };

// One cost function c(s, a, s') stored as a default plus sparse overrides.
struct Objective {
  Aggregation aggregation = Aggregation::Sum;
  double defaultCost = 0.0;
  std::unordered_map<std::uint64_t, double> overrides;

  static std::uint64_t key(StateId s, ActionId a, StateId to) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 40) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 20) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(to));
  }
  void set_cost(StateId s, ActionId a, StateId to, double c) {
    overrides[key(s, a, to)] = c;
  }
  double cost(StateId s, ActionId a, StateId to) const {
    auto it = overrides.find(key(s, a, to));
    return it == overrides.end() ? defaultCost : it->second;
  }
};

// Ordered list of objectives; index 0 has the highest lexicographic priority.
struct CostSpec {
  std::vector<Objective> objectives;
  int size() const { return static_cast<int>(objectives.size()); }
};

struct Diagnostic {
  std::string location;
  std::string message;
};

// Checks the structural invariants: per-(s,a) probabilities in (0,1] summing
// to 1 within 1e-12, nonempty target set, nonempty admissible sets, and
// in-range transition references. Returns one diagnostic per violation.
std::vector<Diagnostic> validate_system(const StochasticTransitionSystem& sys);

// Checks cost positivity (every objective cost must be > 0).
std::vector<Diagnostic> validate_costs(const StochasticTransitionSystem& sys,
                                       const CostSpec& spec);

struct Trajectory {
  std::vector<StateId> states;
  std::vector<ActionId> actions;
  std::optional<int> hittingTime;  // absent when the step cap was reached
};

// Stochastic policy over opaque decision-state indices. Decision states are
// plain states for stationary policies and augmented indices for policies
// driven through a DecisionAdapter.
struct StochasticPolicy {
  std::unordered_map<std::int64_t, std::vector<std::pair<ActionId, double>>> probs;

  void set(std::int64_t decisionState, ActionId a, double p) {
    probs[decisionState].emplace_back(a, p);
  }
  // Deterministic convenience: probability 1 on a single action.
  void choose(std::int64_t decisionState, ActionId a) { set(decisionState, a, 1.0); }
};

// P_pi(xi): product of policy and transition probabilities along xi.
// The decision-state sequence defaults to the plain state sequence.
double trajectory_probability(const Trajectory& traj, const StochasticPolicy& policy,
                              const StochasticTransitionSystem& sys);

// Which transitions the MAX aggregation ranges over. The final transition is
// included by default; the variant excluding it exists for comparison runs.
enum class MaxCostRange { AllTransitions, ExcludeFinal };

// Per-objective realized cost of a completed trajectory: sum or max of the
// one-step costs. A zero-step trajectory evaluates to 0 for both kinds.
std::vector<double> evaluate_trajectory_costs(
    const Trajectory& traj, const CostSpec& spec,
    const StochasticTransitionSystem& sys,
    MaxCostRange range = MaxCostRange::AllTransitions);

}  // namespace lexssp
