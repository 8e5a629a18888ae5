#pragma once

#include <functional>
#include <vector>

#include "lexssp/dfa.hpp"
#include "lexssp/system.hpp"

namespace lexssp {

// Synchronous composition of a system and a DFA monitor, materialized over
// the product states reachable from (s0, delta(q0, L(s0))) — the initial
// label is consumed before the first decision. Product states with an
// accepting automaton component are terminal (the run stops at the first
// acceptance); rejecting-sink pairs are retained as penalty states.
struct ProductSystem {
  StochasticTransitionSystem sys;  // product states; targets = accepting pairs
  CostSpec costs;                  // base edge costs lifted to product edges
  Dfa dfa;

  std::vector<StateId> baseOf;  // product state -> base state
  std::vector<int> qOf;         // product state -> automaton state
  std::vector<char> rejecting;  // product state sits in the rejecting sink
  StateId initial = 0;

  int num_base() const { return numBase_; }
  StateId pair_index(StateId base, int q) const {  // -1 when not materialized
    return pairIndex_[static_cast<std::size_t>(base) * numQ_ + q];
  }

  int numBase_ = 0;
  int numQ_ = 0;
  std::vector<StateId> pairIndex_;
};

// Builds the product. The DFA must be total; base labels are masked to the
// DFA's AP set. Transition probabilities are copied bit-for-bit.
ProductSystem build_product(const StochasticTransitionSystem& sys,
                            const CostSpec& costs, const Dfa& dfa, StateId s0);

// Product against a two-state reach monitor of the base target set: the
// automaton accepts as soon as a target state is entered (or immediately
// when s0 is a target). Gives formula-free problems the same solver-facing
// shape as formula-constrained ones.
ProductSystem build_target_product(const StochasticTransitionSystem& sys,
                                   const CostSpec& costs, StateId s0);

// Memory a policy carries along a product trajectory (e.g. running-maxima
// indices), advanced on every product edge.
struct PolicyMemory {
  int size = 1;
  int initial = 0;
  std::function<int(int mem, StateId prodFrom, ActionId a, StateId prodTo)> update;
};

// Exact probability that the policy's product trajectory reaches an
// accepting state within at most horizon steps: backward induction over
// (steps remaining, product state, memory). The policy sees the steps
// remaining, the product state, and the memory value.
double satisfaction_probability(
    const ProductSystem& prod, int horizon, const PolicyMemory& memory,
    const std::function<ActionId(int h, StateId x, int mem)>& policy);

// Stationary convenience overload (unit memory).
double satisfaction_probability(const ProductSystem& prod, int horizon,
                                const std::function<ActionId(StateId x)>& policy);

}  // namespace lexssp
