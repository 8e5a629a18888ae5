#include "lexssp/grid.hpp"

#include <algorithm>

#include "lexssp/errors.hpp"

namespace lexssp {

std::string GridScenario::name_of(Cell c) const {
  auto it = names.find(c);
  if (it != names.end()) return it->second;
  return "s" + std::to_string(c.second * width + c.first);
}

std::vector<Cell> GridScenario::open_cells() const {
  std::vector<Cell> out;
  for (int r = 0; r < height; ++r)
    for (int col = 0; col < width; ++col)
      if (is_open({col, r})) out.push_back({col, r});
  return out;
}

namespace {

// Action order fixed as U, D, L, R; slips go to the other open neighbors.
constexpr int kDc[4] = {0, 0, -1, 1};
constexpr int kDr[4] = {-1, 1, 0, 0};
const char* kActionNames[4] = {"U", "D", "L", "R"};

std::vector<Cell> open_neighbors(const GridScenario& g, Cell c) {
  std::vector<Cell> out;
  for (int d = 0; d < 4; ++d) {
    Cell n{c.first + kDc[d], c.second + kDr[d]};
    if (g.is_open(n)) out.push_back(n);
  }
  return out;
}

}  // namespace

std::vector<Diagnostic> validate_grid(const GridScenario& g) {
  std::vector<Diagnostic> out;
  if (g.width <= 0 || g.height <= 0)
    out.push_back({"grid", "width and height must be positive"});
  for (Cell c : g.blocked)
    if (c.first < 0 || c.first >= g.width || c.second < 0 || c.second >= g.height)
      out.push_back({"grid/blocked", "blocked cell outside the grid"});

  std::map<std::string, Cell> byName;
  for (Cell c : g.open_cells()) {
    std::string n = g.name_of(c);
    auto [it, fresh] = byName.emplace(n, c);
    if (!fresh) out.push_back({"grid/names", "duplicate state name " + n});
  }
  auto findCell = [&](const std::string& n) -> const Cell* {
    auto it = byName.find(n);
    return it == byName.end() ? nullptr : &it->second;
  };

  if (!findCell(g.start))
    out.push_back({"grid/start", "start '" + g.start + "' is not an open cell"});
  if (!findCell(g.goal))
    out.push_back({"grid/goal", "goal '" + g.goal + "' is not an open cell"});
  if (g.start == g.goal)
    out.push_back({"grid", "start and goal must be distinct"});

  for (Cell c : g.open_cells())
    if (open_neighbors(g, c).size() < 2)
      out.push_back({"grid/" + g.name_of(c),
                     "cell has fewer than two open neighbors (unsupported "
                     "topology)"});

  if (g.hasMaxObjective && !(g.maxCostDefault > 0.0)) {
    bool covered = true;
    for (Cell c : g.open_cells())
      if (!g.maxCostMap.count(g.name_of(c))) covered = false;
    if (!covered)
      out.push_back({"grid/max_cost", "cost map must cover all open cells"});
  }
  if (g.hasSumObjective && !(g.sumCostDefault > 0.0)) {
    bool covered = true;
    for (Cell c : g.open_cells())
      if (!g.sumCostMap.count(g.name_of(c))) covered = false;
    if (!covered)
      out.push_back({"grid/sum_cost", "cost map must cover all open cells"});
  }
  for (const auto& [name, c] : g.maxCostMap)
    if (!(c > 0.0))
      out.push_back({"grid/max_cost/" + name, "costs must be strictly positive"});
  for (const auto& [name, c] : g.sumCostMap)
    if (!(c > 0.0))
      out.push_back({"grid/sum_cost/" + name, "costs must be strictly positive"});
  for (const auto& [name, props] : g.labels)
    if (!findCell(name))
      out.push_back({"grid/labels/" + name, "label on unknown state"});
  if (!g.hasMaxObjective && !g.hasSumObjective)
    out.push_back({"grid", "at least one objective is required"});
  return out;
}

GridBuild build_grid_system(const GridScenario& g) {
  auto diags = validate_grid(g);
  if (!diags.empty())
    throw InputError("invalid grid: " + diags.front().location + ": " +
                     diags.front().message);

  GridBuild out;
  SystemBuilder b;
  std::vector<Cell> cells = g.open_cells();
  for (Cell c : cells) b.state(g.name_of(c));
  for (int d = 0; d < 4; ++d) b.action(kActionNames[d]);

  for (Cell c : cells) {
    auto neighbors = open_neighbors(g, c);
    double pIntended = 0.0;
    switch (neighbors.size()) {
      case 2: pIntended = 0.9; break;
      case 3: pIntended = 0.8; break;
      case 4: pIntended = 0.7; break;
      default: throw InputError("unsupported topology at " + g.name_of(c));
    }
    for (int d = 0; d < 4; ++d) {
      Cell intended{c.first + kDc[d], c.second + kDr[d]};
      if (!g.is_open(intended)) continue;  // inadmissible action
      for (Cell n : neighbors)
        b.transition(g.name_of(c), kActionNames[d], g.name_of(n),
                     n == intended ? pIntended : 0.1);
    }
  }
  b.set_target(g.goal);
  for (const auto& [name, props] : g.labels)
    for (const auto& p : props) b.label(name, p);
  out.sys = b.build();

  auto make_objective = [&](Aggregation agg, double defaultCost,
                            const std::map<std::string, double>& costMap) {
    Objective obj;
    obj.aggregation = agg;
    obj.defaultCost = defaultCost;
    for (StateId s = 0; s < out.sys.num_states(); ++s)
      for (ActionId a : out.sys.admissible[s])
        for (const auto& tr : out.sys.successors(s, a)) {
          auto it = costMap.find(out.sys.states[tr.to]);
          if (it != costMap.end() && it->second != defaultCost)
            obj.set_cost(s, a, tr.to, it->second);
        }
    return obj;
  };
  if (g.hasMaxObjective)
    out.costs.objectives.push_back(
        make_objective(Aggregation::Max, g.maxCostDefault, g.maxCostMap));
  if (g.hasSumObjective)
    out.costs.objectives.push_back(
        make_objective(Aggregation::Sum, g.sumCostDefault, g.sumCostMap));
  return out;
}

}  // namespace lexssp
