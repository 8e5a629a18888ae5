#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexssp/max_solver.hpp"
#include "lexssp/product.hpp"
#include "lexssp/system.hpp"

namespace lexssp {

enum class TieBreak { LowestActionIndex };

struct SolverConfig {
  int horizon = 1;
  double cFail = 1e6;
  // Absolute slack for the action filter. Unset: per decision cell and
  // objective layer, 1e-6 times the largest |Q| among the candidate actions.
  std::optional<double> epsilon;
  TieBreak tieBreak = TieBreak::LowestActionIndex;
  // Cap on (horizon+1) * |product states| * prod |lambda domains|.
  std::int64_t maxCells = 50'000'000;
};

// Dense finite-horizon solution over augmented product states
// (h, x, lambda-pack): per-objective value tables, the surviving action set
// of every filtering layer (bitmask over action ids), and the final policy.
struct LexSolution {
  int horizon = 0;
  int numObjectives = 0;
  std::vector<int> maxObjIdx;              // objective indices with MAX aggregation
  std::vector<LambdaDomain> lambdaDomains;  // parallel to maxObjIdx
  StateId numStates = 0;                    // product states
  int numPacks = 1;                         // prod of domain sizes
  std::vector<int> packStride;              // mixed-radix strides

  std::vector<std::vector<double>> J;                  // [k][cell]
  std::vector<std::vector<std::uint64_t>> actionSets;  // [k][cell]
  std::vector<std::int16_t> policy;                    // [cell], -1 at terminals
  std::vector<std::string> warnings;

  std::int64_t cell(int h, StateId x, int pack) const {
    return (static_cast<std::int64_t>(h) * numStates + x) * numPacks + pack;
  }
  int pack_of(const std::vector<int>& lamIdx) const;
  std::vector<int> unpack(int pack) const;
  double value_at_start(const ProductSystem& prod, int k) const {
    return J[k][cell(horizon, prod.initial, 0)];
  }
};

// Keeps every action whose value is within eps of the best; never empty for
// nonempty input. qValues pairs (action, Q), one entry per candidate.
std::vector<ActionId> epsilon_filter(
    const std::vector<std::pair<ActionId, double>>& qValues, double eps);

// Backward induction h = 1..horizon over (h, x, lambda-pack). Boundaries:
// accepting product states score lambda_k (MAX) or 0 (SUM) at every h,
// rejecting-sink states and exhausted non-terminal states (h = 0) score
// cFail in every objective. Objectives are processed in priority order,
// each minimizing over the previous layer's surviving action set; running
// maxima are joined per MAX objective on every edge.
LexSolution solve_lexicographic(const ProductSystem& prod, const SolverConfig& cfg);

// Lambda pack after traversing the product edge (xFrom, a, xTo).
int advance_pack(const ProductSystem& prod, const LexSolution& sol, int pack,
                 StateId xFrom, ActionId a, StateId xTo);

struct TrajectoryReport {
  std::uint64_t seed = 0;
  std::vector<StateId> baseStates;   // base-system states, start included
  std::vector<ActionId> actions;
  std::vector<int> automatonStates;  // after each position, initial included
  std::vector<double> realizedCosts;  // per objective
  bool satisfied = false;
  bool rejected = false;  // entered the rejecting sink
  bool timedOut = false;  // horizon exhausted
};

struct RunStats {
  int samples = 0;
  int satisfied = 0;
  double satisfactionRate = 0.0;
  std::vector<double> meanCosts;  // over satisfied runs; NaN when none
};

struct SimulationResult {
  std::vector<TrajectoryReport> trajectories;
  RunStats stats;
};

// Executes the solved policy: h countdown, automaton progression and lambda
// joins tracked in sync with the sampled base trajectory. Sample i uses
// derive_seed(rootSeed, i).
SimulationResult run_policy(const ProductSystem& prod, const LexSolution& sol,
                            std::uint64_t rootSeed, int nSamples);

// Exact satisfaction probability of the solved policy from the initial
// augmented state, by backward induction (no sampling).
double policy_satisfaction(const ProductSystem& prod, const LexSolution& sol);

// Solution archive: policy.csv (h,state,q,lambda...,action), values_k.csv
// per objective, meta.json. Rows cover the augmented states reachable from
// (horizon, initial, 0) under the policy (closure over all slips).
void write_solution_archive(const std::string& dir, const ProductSystem& prod,
                            const LexSolution& sol, const SolverConfig& cfg);

struct ArchivedPolicy {
  SolverConfig cfg;
  int horizon = 0;
  std::vector<double> startValues;
  std::vector<LambdaDomain> lambdaDomains;
  std::vector<int> maxObjIdx;
  std::vector<int> packStride;
  int numPacks = 1;
  std::unordered_map<std::int64_t, ActionId> action;  // keyed like LexSolution::cell

  std::int64_t cell(int h, StateId x, int pack, StateId numStates) const {
    return (static_cast<std::int64_t>(h) * numStates + x) * numPacks + pack;
  }
};

ArchivedPolicy read_solution_archive(const std::string& dir,
                                     const ProductSystem& prod);

// Simulation and exact satisfaction driven by an archived policy; augmented
// states missing from the archive fall back to the lowest admissible action.
SimulationResult run_archived_policy(const ProductSystem& prod,
                                     const ArchivedPolicy& pol,
                                     std::uint64_t rootSeed, int nSamples);
double archived_satisfaction(const ProductSystem& prod, const ArchivedPolicy& pol);

}  // namespace lexssp
