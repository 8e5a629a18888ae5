#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexssp/system.hpp"

namespace lexssp {

using Cell = std::pair<int, int>;  // (col, row), row 0 at the top

// Gridworld description. Costs attach to the state being ENTERED:
// c(s, a, s') = costMap(s'). Cells without an explicit name default to
// "s{row-major index}" (0-based, blocked cells included in the count).
struct GridScenario {
  int width = 0;
  int height = 0;
  std::set<Cell> blocked;
  std::map<Cell, std::string> names;
  std::map<std::string, double> maxCostMap;  // keyed by state name; "" = default absent
  double maxCostDefault = 0.0;
  bool hasMaxObjective = false;
  std::map<std::string, double> sumCostMap;
  double sumCostDefault = 0.0;
  bool hasSumObjective = false;
  std::string start;
  std::string goal;
  std::map<std::string, std::vector<std::string>> labels;

  bool is_open(Cell c) const {
    return c.first >= 0 && c.first < width && c.second >= 0 && c.second < height &&
           !blocked.count(c);
  }
  std::string name_of(Cell c) const;
  std::vector<Cell> open_cells() const;  // row-major order
};

// Actions U, D, L, R. Intended move succeeds with probability 0.9 / 0.8 /
// 0.7 for cells with 2 / 3 / 4 open neighbors; each other open neighbor
// receives slip mass 0.1. Actions pointing off-grid or into blocked cells
// are inadmissible. Cells with fewer than two open neighbors are an
// unsupported topology (InputError). Targets = {goal}.
struct GridBuild {
  StochasticTransitionSystem sys;
  CostSpec costs;  // MAX objective first when present, then SUM
};
GridBuild build_grid_system(const GridScenario& g);

std::vector<Diagnostic> validate_grid(const GridScenario& g);

}  // namespace lexssp
