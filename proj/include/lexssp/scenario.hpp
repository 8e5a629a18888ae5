#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexssp/grid.hpp"
#include "lexssp/lex_solver.hpp"
#include "lexssp/product.hpp"
#include "lexssp/system.hpp"

namespace lexssp {

// A complete problem instance: system + costs (either explicit or generated
// from a grid block), optional FLTL constraint, and solver parameters.
struct Scenario {
  StochasticTransitionSystem system;
  CostSpec costs;
  std::string start;
  std::optional<GridScenario> grid;       // retained for rendering
  std::optional<std::string> formula;     // FLTL text
  int horizon = 1;
  double cFail = 1e6;
  std::optional<double> epsilon;
};

// JSON schema: either explicit core keys (states, actions, admissible,
// transitions, targets, labels, objectives) or a "grid" block, plus start,
// horizon, c_fail and optional formula / epsilon. Serialization is
// canonical: sorted keys, shortest-round-trip floats; load(save(x)) is
// byte-identical to save(x).
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

std::vector<Diagnostic> validate_scenario(const Scenario& sc);

// Bundled benchmark: 7x7 gridworld, wall column with gateways s22 (cost 90)
// and s23 (cost 30), single MAX objective, start s8, goal s41, H = 200.
Scenario experiment_1_scenario();

// Bundled benchmark: same grid with a secondary unit-cost SUM objective and
// the waypoint/avoidance FLTL constraint, start s10, H = 2000.
Scenario experiment_2_scenario();

// Compiles the scenario into a solver-ready product: parses and translates
// the formula when present, otherwise wraps the base targets in a reach
// monitor.
struct CompiledScenario {
  ProductSystem prod;
  SolverConfig cfg;
};
CompiledScenario compile_scenario(const Scenario& sc);

struct SolvedScenario {
  ProductSystem prod;
  SolverConfig cfg;
  LexSolution sol;
};
SolvedScenario solve_scenario(const Scenario& sc);

}  // namespace lexssp
