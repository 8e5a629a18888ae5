#include "lexssp/max_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "lexssp/errors.hpp"

namespace lexssp {

LambdaDomain LambdaDomain::from(const StochasticTransitionSystem& sys,
                                const Objective& obj) {
  std::set<double> vals = {0.0};
  for (StateId s = 0; s < sys.num_states(); ++s)
    for (ActionId a : sys.admissible[s])
      for (const auto& tr : sys.successors(s, a)) vals.insert(obj.cost(s, a, tr.to));
  LambdaDomain dom;
  dom.values.assign(vals.begin(), vals.end());
  return dom;
}

int LambdaDomain::join(int lamIdx, double c) const {
  if (c <= values[lamIdx]) return lamIdx;
  return index_of(c);
}

int LambdaDomain::index_of(double v) const {
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end() || *it != v)
    throw InputError("value " + std::to_string(v) + " is not in the lambda domain");
  return static_cast<int>(it - values.begin());
}

double max_backup(const StochasticTransitionSystem& sys, const Objective& obj,
                  const LambdaDomain& dom, const MaxValueTable& J, StateId s,
                  int lamIdx) {
  int L = dom.size();
  if (sys.target[s]) return dom.values[lamIdx];
  double best = std::numeric_limits<double>::infinity();
  for (ActionId a : sys.admissible[s]) {
    double q = 0.0;
    for (const auto& tr : sys.successors(s, a)) {
      int lam2 = dom.join(lamIdx, obj.cost(s, a, tr.to));
      q += tr.p * J[static_cast<std::size_t>(tr.to) * L + lam2];
    }
    best = std::min(best, q);
  }
  return best;
}

MaxVIResult value_iterate_max(const StochasticTransitionSystem& sys,
                              const Objective& obj, const LambdaDomain& dom,
                              const MaxVIOptions& opts) {
  int n = sys.num_states();
  int L = dom.size();
  int maxIter = opts.maxIter > 0 ? opts.maxIter : 10 * n * L;

  MaxVIResult res;
  res.J.assign(static_cast<std::size_t>(n) * L, 0.0);
  for (StateId s = 0; s < n; ++s)
    if (sys.target[s])
      for (int l = 0; l < L; ++l) res.J[static_cast<std::size_t>(s) * L + l] = dom.values[l];

  MaxValueTable next = res.J;
  for (int iter = 0; iter < maxIter; ++iter) {
    double residual = 0.0;
    MaxValueTable& dst = opts.gaussSeidel ? res.J : next;
    for (StateId s = 0; s < n; ++s) {
      if (sys.target[s]) continue;
      for (int l = 0; l < L; ++l) {
        std::size_t idx = static_cast<std::size_t>(s) * L + l;
        double v = max_backup(sys, obj, dom, res.J, s, l);
        residual = std::max(residual, std::abs(v - res.J[idx]));
        dst[idx] = v;
      }
    }
    if (!opts.gaussSeidel) res.J = next;
    res.iterations = iter + 1;
    res.residual = residual;
    if (residual < opts.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::vector<ActionId> extract_policy(const StochasticTransitionSystem& sys,
                                     const Objective& obj, const LambdaDomain& dom,
                                     const MaxValueTable& J) {
  int n = sys.num_states();
  int L = dom.size();
  std::vector<ActionId> policy(static_cast<std::size_t>(n) * L, -1);
  for (StateId s = 0; s < n; ++s) {
    if (sys.target[s]) continue;
    for (int l = 0; l < L; ++l) {
      double best = std::numeric_limits<double>::infinity();
      ActionId bestA = -1;
      for (ActionId a : sys.admissible[s]) {
        double q = 0.0;
        for (const auto& tr : sys.successors(s, a)) {
          int lam2 = dom.join(l, obj.cost(s, a, tr.to));
          q += tr.p * J[static_cast<std::size_t>(tr.to) * L + lam2];
        }
        if (q < best) {  // strict: ties keep the lowest action index
          best = q;
          bestA = a;
        }
      }
      policy[static_cast<std::size_t>(s) * L + l] = bestA;
    }
  }
  return policy;
}

NaiveVIResult naive_value_iterate(const StochasticTransitionSystem& sys,
                                  const Objective& obj, double tol, int maxIter) {
  int n = sys.num_states();
  NaiveVIResult res;
  res.J.assign(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (int iter = 0; iter < maxIter; ++iter) {
    double residual = 0.0;
    for (StateId s = 0; s < n; ++s) {
      if (sys.target[s]) continue;
      double best = std::numeric_limits<double>::infinity();
      for (ActionId a : sys.admissible[s]) {
        double q = 0.0;
        for (const auto& tr : sys.successors(s, a))
          q += tr.p * std::max(obj.cost(s, a, tr.to), res.J[tr.to]);
        best = std::min(best, q);
      }
      next[s] = best;
      residual = std::max(residual, std::abs(best - res.J[s]));
    }
    res.J = next;
    res.iterations = iter + 1;
    if (residual < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::vector<ActionId> naive_greedy_policy(const StochasticTransitionSystem& sys,
                                          const Objective& obj,
                                          const std::vector<double>& J) {
  int n = sys.num_states();
  std::vector<ActionId> policy(n, -1);
  for (StateId s = 0; s < n; ++s) {
    if (sys.target[s]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (ActionId a : sys.admissible[s]) {
      double q = 0.0;
      for (const auto& tr : sys.successors(s, a))
        q += tr.p * std::max(obj.cost(s, a, tr.to), J[tr.to]);
      if (q < best) {
        best = q;
        policy[s] = a;
      }
    }
  }
  return policy;
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string max_values_csv(const StochasticTransitionSystem& sys,
                           const LambdaDomain& dom, const MaxValueTable& J) {
  std::ostringstream os;
  os << "state,lambda,value\n";
  for (StateId s = 0; s < sys.num_states(); ++s)
    for (int l = 0; l < dom.size(); ++l)
      os << sys.states[s] << ',' << fmt_double(dom.values[l]) << ','
         << fmt_double(J[static_cast<std::size_t>(s) * dom.size() + l]) << '\n';
  return os.str();
}

std::string max_policy_csv(const StochasticTransitionSystem& sys,
                           const LambdaDomain& dom,
                           const std::vector<ActionId>& policy) {
  std::ostringstream os;
  os << "state,lambda,action\n";
  for (StateId s = 0; s < sys.num_states(); ++s)
    for (int l = 0; l < dom.size(); ++l) {
      ActionId a = policy[static_cast<std::size_t>(s) * dom.size() + l];
      os << sys.states[s] << ',' << fmt_double(dom.values[l]) << ','
         << (a < 0 ? std::string("-") : sys.actions[a]) << '\n';
    }
  return os.str();
}

}  // namespace lexssp
