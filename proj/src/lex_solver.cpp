#include "lexssp/lex_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lexssp/errors.hpp"
#include "lexssp/rng.hpp"
#include "lexssp/version.hpp"

namespace lexssp {

int LexSolution::pack_of(const std::vector<int>& lamIdx) const {
  int pack = 0;
  for (std::size_t j = 0; j < lamIdx.size(); ++j) pack += lamIdx[j] * packStride[j];
  return pack;
}

std::vector<int> LexSolution::unpack(int pack) const {
  std::vector<int> lamIdx(maxObjIdx.size(), 0);
  for (std::size_t j = 0; j < maxObjIdx.size(); ++j)
    lamIdx[j] = (pack / packStride[j]) % lambdaDomains[j].size();
  return lamIdx;
}

std::vector<ActionId> epsilon_filter(
    const std::vector<std::pair<ActionId, double>>& qValues, double eps) {
  std::vector<ActionId> out;
  if (qValues.empty()) return out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, q] : qValues) best = std::min(best, q);
  for (const auto& [a, q] : qValues)
    if (q <= best + eps) out.push_back(a);
  return out;
}

namespace {

struct Edge {
  StateId to;
  double p;
  std::vector<double> cost;    // per objective
  std::vector<int> costIdx;    // per MAX objective: index of cost in its domain
};

struct EdgeTable {
  // edges[x][i] for admissible action acts[x][i].
  std::vector<std::vector<ActionId>> acts;
  std::vector<std::vector<std::vector<Edge>>> edges;
};

EdgeTable build_edges(const ProductSystem& prod, const std::vector<int>& maxObjIdx,
                      const std::vector<LambdaDomain>& domains) {
  const auto& sys = prod.sys;
  int K = prod.costs.size();
  EdgeTable et;
  et.acts.resize(sys.num_states());
  et.edges.resize(sys.num_states());
  for (StateId x = 0; x < sys.num_states(); ++x) {
    for (ActionId a : sys.admissible[x]) {
      et.acts[x].push_back(a);
      std::vector<Edge> list;
      for (const auto& tr : sys.successors(x, a)) {
        Edge e;
        e.to = tr.to;
        e.p = tr.p;
        e.cost.resize(K);
        for (int k = 0; k < K; ++k)
          e.cost[k] = prod.costs.objectives[k].cost(x, a, tr.to);
        e.costIdx.resize(maxObjIdx.size());
        for (std::size_t j = 0; j < maxObjIdx.size(); ++j)
          e.costIdx[j] = domains[j].index_of(e.cost[maxObjIdx[j]]);
        list.push_back(std::move(e));
      }
      et.edges[x].push_back(std::move(list));
    }
  }
  return et;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Base-state name of a product state ("s8@q0" -> "s8").
std::string base_name(const ProductSystem& prod, StateId x) {
  const std::string& n = prod.sys.states[x];
  auto pos = n.rfind("@q");
  return pos == std::string::npos ? n : n.substr(0, pos);
}

}  // namespace

LexSolution solve_lexicographic(const ProductSystem& prod, const SolverConfig& cfg) {
  const auto& sys = prod.sys;
  int K = prod.costs.size();
  if (K == 0) throw InputError("cost specification has no objectives");
  if (cfg.horizon < 1) throw InputError("horizon must be a positive integer");
  if (cfg.epsilon && *cfg.epsilon < 0.0) throw InputError("epsilon must be nonnegative");
  if (sys.num_actions() > 64)
    throw InputError("action-set masks support at most 64 actions");

  LexSolution sol;
  sol.horizon = cfg.horizon;
  sol.numObjectives = K;
  sol.numStates = sys.num_states();
  for (int k = 0; k < K; ++k)
    if (prod.costs.objectives[k].aggregation == Aggregation::Max)
      sol.maxObjIdx.push_back(k);
  for (int k : sol.maxObjIdx)
    sol.lambdaDomains.push_back(LambdaDomain::from(sys, prod.costs.objectives[k]));

  int numMax = static_cast<int>(sol.maxObjIdx.size());
  sol.packStride.assign(numMax, 1);
  for (int j = numMax - 2; j >= 0; --j)
    sol.packStride[j] = sol.packStride[j + 1] * sol.lambdaDomains[j + 1].size();
  sol.numPacks = 1;
  for (int j = 0; j < numMax; ++j) sol.numPacks *= sol.lambdaDomains[j].size();

  std::int64_t cells = static_cast<std::int64_t>(cfg.horizon + 1) * sol.numStates *
                       sol.numPacks;
  if (cells > cfg.maxCells) {
    std::ostringstream msg;
    msg << "augmented table needs " << cells << " cells ((H+1)*|S||Q|*prod|Lambda| = "
        << (cfg.horizon + 1) << "*" << sol.numStates << "*" << sol.numPacks
        << "), above the cap of " << cfg.maxCells;
    throw CapacityError(msg.str());
  }

  // Failure must dominate any attainable accumulated cost to price
  // infeasibility correctly.
  for (int k = 0; k < K; ++k) {
    double maxStep = 0.0;
    for (StateId x = 0; x < sys.num_states(); ++x)
      for (ActionId a : sys.admissible[x])
        for (const auto& tr : sys.successors(x, a))
          maxStep = std::max(maxStep, prod.costs.objectives[k].cost(x, a, tr.to));
    if (!(cfg.cFail > static_cast<double>(cfg.horizon) * maxStep)) {
      std::ostringstream msg;
      msg << "cFail " << cfg.cFail << " does not dominate H * max one-step cost = "
          << cfg.horizon << " * " << maxStep << " for objective " << k;
      sol.warnings.push_back(msg.str());
    }
  }

  EdgeTable et = build_edges(prod, sol.maxObjIdx, sol.lambdaDomains);

  sol.J.assign(K, std::vector<double>(cells, 0.0));
  sol.actionSets.assign(K, std::vector<std::uint64_t>(cells, 0));
  sol.policy.assign(cells, -1);

  // Boundary layers: accepting states score their running maxima (MAX) or 0
  // (SUM) at every h; rejecting-sink states score cFail at every h;
  // non-terminal states score cFail once the horizon is exhausted.
  for (StateId x = 0; x < sol.numStates; ++x) {
    bool isTarget = sys.target[x] != 0;
    bool isRejecting = prod.rejecting[x] != 0;
    for (int pack = 0; pack < sol.numPacks; ++pack) {
      for (int k = 0; k < K; ++k) {
        double v;
        if (isTarget) {
          v = 0.0;
          for (int j = 0; j < numMax; ++j)
            if (sol.maxObjIdx[j] == k)
              v = sol.lambdaDomains[j]
                      .values[(pack / sol.packStride[j]) %
                              sol.lambdaDomains[j].size()];
        } else if (isRejecting) {
          v = cfg.cFail;
        } else {
          v = cfg.cFail;  // h = 0 layer only; overwritten for h >= 1 below
        }
        if (isTarget || isRejecting) {
          for (int h = 0; h <= cfg.horizon; ++h)
            sol.J[k][sol.cell(h, x, pack)] = v;
        } else {
          sol.J[k][sol.cell(0, x, pack)] = v;
        }
      }
    }
  }

  std::vector<std::pair<ActionId, double>> qv;

  for (int h = 1; h <= cfg.horizon; ++h) {
    for (StateId x = 0; x < sol.numStates; ++x) {
      if (sys.target[x] || prod.rejecting[x]) continue;
      const auto& acts = et.acts[x];
      for (int pack = 0; pack < sol.numPacks; ++pack) {
        std::vector<int> lamIdx(numMax);
        for (int j = 0; j < numMax; ++j)
          lamIdx[j] = (pack / sol.packStride[j]) % sol.lambdaDomains[j].size();

        std::vector<char> alive(acts.size(), 1);
        for (int k = 0; k < K; ++k) {
          bool isSum = prod.costs.objectives[k].aggregation == Aggregation::Sum;
          qv.clear();
          double maxAbsQ = 0.0;
          for (std::size_t ai = 0; ai < acts.size(); ++ai) {
            if (!alive[ai]) continue;
            double q = 0.0;
            for (const auto& e : et.edges[x][ai]) {
              int np = 0;
              for (int j = 0; j < numMax; ++j)
                np += std::max(lamIdx[j], e.costIdx[j]) * sol.packStride[j];
              double j1 = sol.J[k][sol.cell(h - 1, e.to, np)];
              q += isSum ? e.p * (e.cost[k] + j1) : e.p * j1;
            }
            qv.emplace_back(static_cast<ActionId>(ai), q);
            maxAbsQ = std::max(maxAbsQ, std::abs(q));
          }
          double eps = cfg.epsilon ? *cfg.epsilon : 1e-6 * maxAbsQ;
          double best = std::numeric_limits<double>::infinity();
          for (const auto& [ai, q] : qv) best = std::min(best, q);
          sol.J[k][sol.cell(h, x, pack)] = best;
          std::uint64_t mask = 0;
          std::fill(alive.begin(), alive.end(), 0);
          for (const auto& [ai, q] : qv)
            if (q <= best + eps) {
              alive[ai] = 1;
              mask |= std::uint64_t{1} << acts[ai];
            }
          sol.actionSets[k][sol.cell(h, x, pack)] = mask;
        }
        for (std::size_t ai = 0; ai < acts.size(); ++ai)
          if (alive[ai]) {
            sol.policy[sol.cell(h, x, pack)] = static_cast<std::int16_t>(acts[ai]);
            break;
          }
      }
    }
  }
  return sol;
}

int advance_pack(const ProductSystem& prod, const LexSolution& sol, int pack,
                 StateId xFrom, ActionId a, StateId xTo) {
  int np = 0;
  for (std::size_t j = 0; j < sol.maxObjIdx.size(); ++j) {
    const auto& dom = sol.lambdaDomains[j];
    int lam = (pack / sol.packStride[j]) % dom.size();
    double c = prod.costs.objectives[sol.maxObjIdx[j]].cost(xFrom, a, xTo);
    np += dom.join(lam, c) * sol.packStride[j];
  }
  return np;
}

namespace {

// Shared execution loop for solved and archived policies.
template <typename ChooseAction>
SimulationResult run_product_policy(const ProductSystem& prod, int horizon,
                                    int numObjectives, ChooseAction&& choose,
                                    std::uint64_t rootSeed, int nSamples,
                                    const std::function<int(int, StateId, ActionId,
                                                            StateId)>& packAdvance) {
  SimulationResult result;
  result.stats.samples = nSamples;
  result.stats.meanCosts.assign(numObjectives,
                                std::numeric_limits<double>::quiet_NaN());
  std::vector<double> sums(numObjectives, 0.0);

  for (int i = 0; i < nSamples; ++i) {
    TrajectoryReport rep;
    rep.seed = derive_seed(rootSeed, i);
    Rng rng(rep.seed);
    StateId x = prod.initial;
    int pack = 0;
    int h = horizon;
    rep.baseStates.push_back(prod.baseOf[x]);
    rep.automatonStates.push_back(prod.qOf[x]);
    rep.realizedCosts.assign(numObjectives, 0.0);

    for (;;) {
      if (prod.sys.target[x]) {
        rep.satisfied = true;
        break;
      }
      if (prod.rejecting[x]) {
        rep.rejected = true;
        break;
      }
      if (h == 0) {
        rep.timedOut = true;
        break;
      }
      ActionId a = choose(h, x, pack);
      const auto& succ = prod.sys.successors(x, a);
      double u = rng.next_double();
      double acc = 0.0;
      StateId y = succ.back().to;
      for (const auto& tr : succ) {
        acc += tr.p;
        if (u < acc) {
          y = tr.to;
          break;
        }
      }
      for (int k = 0; k < numObjectives; ++k) {
        double c = prod.costs.objectives[k].cost(x, a, y);
        if (prod.costs.objectives[k].aggregation == Aggregation::Sum)
          rep.realizedCosts[k] += c;
        else
          rep.realizedCosts[k] = std::max(rep.realizedCosts[k], c);
      }
      pack = packAdvance(pack, x, a, y);
      rep.actions.push_back(a);
      rep.baseStates.push_back(prod.baseOf[y]);
      rep.automatonStates.push_back(prod.qOf[y]);
      x = y;
      --h;
    }

    if (rep.satisfied) {
      ++result.stats.satisfied;
      for (int k = 0; k < numObjectives; ++k) sums[k] += rep.realizedCosts[k];
    }
    result.trajectories.push_back(std::move(rep));
  }

  if (nSamples > 0)
    result.stats.satisfactionRate =
        static_cast<double>(result.stats.satisfied) / nSamples;
  if (result.stats.satisfied > 0)
    for (int k = 0; k < numObjectives; ++k)
      result.stats.meanCosts[k] = sums[k] / result.stats.satisfied;
  return result;
}

}  // namespace

SimulationResult run_policy(const ProductSystem& prod, const LexSolution& sol,
                            std::uint64_t rootSeed, int nSamples) {
  auto choose = [&](int h, StateId x, int pack) -> ActionId {
    ActionId a = sol.policy[sol.cell(h, x, pack)];
    if (a >= 0 && prod.sys.is_admissible(x, a)) return a;
    return prod.sys.admissible[x].front();
  };
  auto adv = [&](int pack, StateId xf, ActionId a, StateId xt) {
    return advance_pack(prod, sol, pack, xf, a, xt);
  };
  return run_product_policy(prod, sol.horizon, sol.numObjectives, choose,
                            rootSeed, nSamples, adv);
}

double policy_satisfaction(const ProductSystem& prod, const LexSolution& sol) {
  PolicyMemory mem;
  mem.size = sol.numPacks;
  mem.initial = 0;
  mem.update = [&](int pack, StateId xf, ActionId a, StateId xt) {
    return advance_pack(prod, sol, pack, xf, a, xt);
  };
  return satisfaction_probability(
      prod, sol.horizon, mem,
      [&](int h, StateId x, int pack) -> ActionId {
        return sol.policy[sol.cell(h, x, pack)];
      });
}

namespace {

// Augmented cells reachable from (horizon, initial, pack 0) under the policy,
// in BFS order over all stochastic branches.
std::vector<std::int64_t> policy_closure(const ProductSystem& prod,
                                         const LexSolution& sol) {
  std::vector<std::int64_t> order;
  std::unordered_set<std::int64_t> seen;
  std::deque<std::tuple<int, StateId, int>> queue;
  queue.emplace_back(sol.horizon, prod.initial, 0);
  seen.insert(sol.cell(sol.horizon, prod.initial, 0));
  while (!queue.empty()) {
    auto [h, x, pack] = queue.front();
    queue.pop_front();
    order.push_back(sol.cell(h, x, pack));
    if (prod.sys.target[x] || prod.rejecting[x] || h == 0) continue;
    ActionId a = sol.policy[sol.cell(h, x, pack)];
    if (a < 0) continue;
    for (const auto& tr : prod.sys.successors(x, a)) {
      int np = advance_pack(prod, sol, pack, x, a, tr.to);
      std::int64_t key = sol.cell(h - 1, tr.to, np);
      if (seen.insert(key).second) queue.emplace_back(h - 1, tr.to, np);
    }
  }
  return order;
}

}  // namespace

void write_solution_archive(const std::string& dir, const ProductSystem& prod,
                            const LexSolution& sol, const SolverConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::vector<std::int64_t> cells = policy_closure(prod, sol);
  std::int64_t layerSize = static_cast<std::int64_t>(sol.numStates) * sol.numPacks;

  auto decompose = [&](std::int64_t cell, int& h, StateId& x, int& pack) {
    h = static_cast<int>(cell / layerSize);
    std::int64_t rest = cell % layerSize;
    x = static_cast<StateId>(rest / sol.numPacks);
    pack = static_cast<int>(rest % sol.numPacks);
  };

  auto row_prefix = [&](std::int64_t cell) {
    int h, pack;
    StateId x;
    decompose(cell, h, x, pack);
    std::ostringstream os;
    os << h << ',' << base_name(prod, x) << ',' << prod.qOf[x];
    for (std::size_t j = 0; j < sol.maxObjIdx.size(); ++j) {
      int lam = (pack / sol.packStride[j]) % sol.lambdaDomains[j].size();
      os << ',' << fmt_double(sol.lambdaDomains[j].values[lam]);
    }
    return os.str();
  };

  std::string lambdaCols;
  for (std::size_t j = 0; j < sol.maxObjIdx.size(); ++j)
    lambdaCols += ",lambda" + std::to_string(j);

  {
    std::ofstream out(fs::path(dir) / "policy.csv");
    out << "h,state,q" << lambdaCols << ",action\n";
    for (std::int64_t cell : cells) {
      std::int16_t a = sol.policy[cell];
      out << row_prefix(cell) << ','
          << (a < 0 ? std::string("-") : prod.sys.actions[a]) << '\n';
    }
  }
  for (int k = 0; k < sol.numObjectives; ++k) {
    std::ofstream out(fs::path(dir) / ("values_" + std::to_string(k) + ".csv"));
    out << "h,state,q" << lambdaCols << ",value\n";
    for (std::int64_t cell : cells)
      out << row_prefix(cell) << ',' << fmt_double(sol.J[k][cell]) << '\n';
  }

  nlohmann::ordered_json meta;
  meta["version"] = kVersion;
  meta["horizon"] = sol.horizon;
  meta["c_fail"] = cfg.cFail;
  if (cfg.epsilon)
    meta["epsilon"] = *cfg.epsilon;
  else
    meta["epsilon"] = nullptr;
  meta["tie_break"] = "lowest-action-index";
  meta["num_objectives"] = sol.numObjectives;
  meta["aggregations"] = nlohmann::json::array();
  for (const auto& obj : prod.costs.objectives)
    meta["aggregations"].push_back(obj.aggregation == Aggregation::Max ? "max"
                                                                       : "sum");
  meta["max_obj_idx"] = sol.maxObjIdx;
  meta["lambda_domains"] = nlohmann::json::array();
  for (const auto& dom : sol.lambdaDomains) meta["lambda_domains"].push_back(dom.values);
  meta["pack_stride"] = sol.packStride;
  meta["num_packs"] = sol.numPacks;
  meta["num_product_states"] = sol.numStates;
  meta["start_values"] = nlohmann::json::array();
  for (int k = 0; k < sol.numObjectives; ++k)
    meta["start_values"].push_back(sol.value_at_start(prod, k));
  std::ofstream out(fs::path(dir) / "meta.json");
  out << meta.dump(2) << "\n";
}

ArchivedPolicy read_solution_archive(const std::string& dir,
                                     const ProductSystem& prod) {
  namespace fs = std::filesystem;
  std::ifstream metaIn(fs::path(dir) / "meta.json");
  if (!metaIn) throw InputError("cannot open " + dir + "/meta.json");
  nlohmann::json meta;
  try {
    metaIn >> meta;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid meta.json: ") + e.what());
  }

  ArchivedPolicy pol;
  try {
    pol.horizon = meta.at("horizon").get<int>();
    pol.cfg.horizon = pol.horizon;
    pol.cfg.cFail = meta.at("c_fail").get<double>();
    if (meta.contains("epsilon") && !meta.at("epsilon").is_null())
      pol.cfg.epsilon = meta.at("epsilon").get<double>();
    pol.maxObjIdx = meta.at("max_obj_idx").get<std::vector<int>>();
    for (const auto& vals : meta.at("lambda_domains")) {
      LambdaDomain dom;
      dom.values = vals.get<std::vector<double>>();
      pol.lambdaDomains.push_back(std::move(dom));
    }
    pol.packStride = meta.at("pack_stride").get<std::vector<int>>();
    pol.numPacks = meta.at("num_packs").get<int>();
    pol.startValues = meta.at("start_values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid meta.json: ") + e.what());
  }

  // (base name, q) -> product state.
  std::unordered_map<std::string, StateId> lookup;
  for (StateId x = 0; x < prod.sys.num_states(); ++x)
    lookup[base_name(prod, x) + "#" + std::to_string(prod.qOf[x])] = x;

  std::ifstream in(fs::path(dir) / "policy.csv");
  if (!in) throw InputError("cannot open " + dir + "/policy.csv");
  std::string line;
  std::getline(in, line);  // header
  int numMax = static_cast<int>(pol.maxObjIdx.size());
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (static_cast<int>(cols.size()) != 4 + numMax)
      throw InputError("policy.csv line " + std::to_string(lineNo) +
                       ": wrong column count");
    const std::string& action = cols.back();
    if (action == "-") continue;
    try {
      int h = std::stoi(cols[0]);
      int q = std::stoi(cols[2]);
      auto it = lookup.find(cols[1] + "#" + std::to_string(q));
      if (it == lookup.end())
        throw InputError("state " + cols[1] + " with automaton state " +
                         std::to_string(q) +
                         " is not in this scenario's product");
      int pack = 0;
      for (int j = 0; j < numMax; ++j)
        pack += pol.lambdaDomains[j].index_of(std::stod(cols[3 + j])) *
                pol.packStride[j];
      pol.action[pol.cell(h, it->second, pack, prod.sys.num_states())] =
          prod.sys.action_index(action);
    } catch (const InputError& e) {
      throw InputError("policy.csv line " + std::to_string(lineNo) + ": " +
                       e.what());
    } catch (const std::exception&) {
      throw InputError("policy.csv line " + std::to_string(lineNo) +
                       ": malformed numeric field");
    }
  }
  return pol;
}

SimulationResult run_archived_policy(const ProductSystem& prod,
                                     const ArchivedPolicy& pol,
                                     std::uint64_t rootSeed, int nSamples) {
  StateId n = prod.sys.num_states();
  auto adv = [&](int pack, StateId xf, ActionId a, StateId xt) {
    int np = 0;
    for (std::size_t j = 0; j < pol.maxObjIdx.size(); ++j) {
      const auto& dom = pol.lambdaDomains[j];
      int lam = (pack / pol.packStride[j]) % dom.size();
      double c = prod.costs.objectives[pol.maxObjIdx[j]].cost(xf, a, xt);
      np += dom.join(lam, c) * pol.packStride[j];
    }
    return np;
  };
  auto choose = [&](int h, StateId x, int pack) -> ActionId {
    auto it = pol.action.find(pol.cell(h, x, pack, n));
    if (it != pol.action.end() && prod.sys.is_admissible(x, it->second))
      return it->second;
    return prod.sys.admissible[x].front();
  };
  return run_product_policy(prod, pol.horizon, prod.costs.size(), choose,
                            rootSeed, nSamples, adv);
}

double archived_satisfaction(const ProductSystem& prod, const ArchivedPolicy& pol) {
  StateId n = prod.sys.num_states();
  PolicyMemory mem;
  mem.size = pol.numPacks;
  mem.initial = 0;
  mem.update = [&](int pack, StateId xf, ActionId a, StateId xt) {
    int np = 0;
    for (std::size_t j = 0; j < pol.maxObjIdx.size(); ++j) {
      const auto& dom = pol.lambdaDomains[j];
      int lam = (pack / pol.packStride[j]) % dom.size();
      double c = prod.costs.objectives[pol.maxObjIdx[j]].cost(xf, a, xt);
      np += dom.join(lam, c) * pol.packStride[j];
    }
    return np;
  };
  return satisfaction_probability(
      prod, pol.horizon, mem, [&](int h, StateId x, int pack) -> ActionId {
        auto it = pol.action.find(pol.cell(h, x, pack, n));
        if (it != pol.action.end() && prod.sys.is_admissible(x, it->second))
          return it->second;
        if (prod.sys.admissible[x].empty()) return -1;
        return prod.sys.admissible[x].front();
      });
}

}  // namespace lexssp
