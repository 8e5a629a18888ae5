#pragma once

#include <vector>

#include "lexssp/system.hpp"

namespace lexssp {

// Finite domain of the running maximum: {0} plus every cost value the
// objective can take on an admissible edge, sorted ascending. Closed under
// max, so maxima can be joined on indices.
struct LambdaDomain {
  std::vector<double> values;

  static LambdaDomain from(const StochasticTransitionSystem& sys,
                           const Objective& obj);

  int size() const { return static_cast<int>(values.size()); }
  // Index of max(values[lamIdx], c); c must be a domain value.
  int join(int lamIdx, double c) const;
  int index_of(double v) const;  // throws InputError when v is not in the domain
};

// Value table over augmented states, J[s * |domain| + lamIdx].
using MaxValueTable = std::vector<double>;

// One Bellman backup at (s, lambda): min over admissible actions of
// sum_{s'} P(s'|s,a) * J(s', max(lambda, c(s,a,s'))). Targets return their
// lambda value.
double max_backup(const StochasticTransitionSystem& sys, const Objective& obj,
                  const LambdaDomain& dom, const MaxValueTable& J, StateId s,
                  int lamIdx);

struct MaxVIOptions {
  double tol = 1e-9;       // sup-norm residual
  int maxIter = 0;         // 0: defaults to 10 * |S| * |domain|
  bool gaussSeidel = false;  // in-place sweeps instead of Jacobi
};

struct MaxVIResult {
  MaxValueTable J;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Value iteration from J = 0 (targets pinned at J(s, lambda) = lambda).
// Converges monotonically to the least fixed point; on instances with free
// loops that fixed point can undervalue improper behavior — the finite-
// horizon solver exists for exactly that reason.
MaxVIResult value_iterate_max(const StochasticTransitionSystem& sys,
                              const Objective& obj, const LambdaDomain& dom,
                              const MaxVIOptions& opts = {});

// Greedy deterministic policy per augmented state; ties resolve to the
// lowest action index. Targets get -1 (no action).
std::vector<ActionId> extract_policy(const StochasticTransitionSystem& sys,
                                     const Objective& obj, const LambdaDomain& dom,
                                     const MaxValueTable& J);

// The recursion that pretends max costs satisfy the plain Bellman equation:
// J(s) = min_a sum P(s'|s,a) * max(c(s,a,s'), J(s')). Kept as a comparison
// baseline; its fixed point underestimates the true expected maximum.
struct NaiveVIResult {
  std::vector<double> J;  // per state
  bool converged = false;
  int iterations = 0;
};
NaiveVIResult naive_value_iterate(const StochasticTransitionSystem& sys,
                                  const Objective& obj, double tol = 1e-12,
                                  int maxIter = 100000);
std::vector<ActionId> naive_greedy_policy(const StochasticTransitionSystem& sys,
                                          const Objective& obj,
                                          const std::vector<double>& J);

// CSV dumps: "state,lambda,value" / "state,lambda,action" with a header row.
std::string max_values_csv(const StochasticTransitionSystem& sys,
                           const LambdaDomain& dom, const MaxValueTable& J);
std::string max_policy_csv(const StochasticTransitionSystem& sys,
                           const LambdaDomain& dom,
                           const std::vector<ActionId>& policy);

}  // namespace lexssp
