#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lexssp/rng.hpp"
#include "lexssp/system.hpp"

namespace lexssp {

// Maps the running history to the decision-state index a policy is queried
// with. One simulation engine then serves plain policies (identity adapter)
// as well as augmented policies that track h, automaton state, or running
// maxima externally.
class DecisionAdapter {
 public:
  virtual ~DecisionAdapter() = default;
  virtual void reset(StateId s0) = 0;
  virtual std::int64_t current() const = 0;
  virtual void advance(ActionId a, StateId next) = 0;
};

// Decision state == plain system state.
class IdentityAdapter : public DecisionAdapter {
 public:
  void reset(StateId s0) override { s_ = s0; }
  std::int64_t current() const override { return s_; }
  void advance(ActionId, StateId next) override { s_ = next; }

 private:
  StateId s_ = 0;
};

// One sampled episode. Stops at the first target hit or at stepCap
// transitions; hittingTime is absent in the latter case. Deterministic in
// the seed. Throws InputError when the policy has no mass at some queried
// decision state.
Trajectory sample_trajectory(const StochasticTransitionSystem& sys,
                             const StochasticPolicy& policy,
                             DecisionAdapter& adapter, StateId s0,
                             std::uint64_t rngSeed, int stepCap);

struct MonteCarloStats {
  int samples = 0;
  int completed = 0;
  double completionRate = 0.0;
  // Means and standard errors over completed trajectories only; NaN when no
  // trajectory completed.
  std::vector<double> mean;
  std::vector<double> stderror;
};

// Seeded Monte-Carlo estimate of the per-objective expected trajectory
// costs. Sample i uses derive_seed(rngSeed, i), so estimates are
// reproducible and order-independent.
MonteCarloStats expected_cost_monte_carlo(const StochasticTransitionSystem& sys,
                                          const StochasticPolicy& policy,
                                          const CostSpec& spec, StateId s0,
                                          int nSamples, std::uint64_t rngSeed,
                                          int stepCap);

}  // namespace lexssp
