#pragma once

#include <string>

#include "lexssp/grid.hpp"
#include "lexssp/lex_solver.hpp"

namespace lexssp {

// ASCII picture of the grid with the trajectory overlaid: '#' blocked,
// 'S' start, 'G' last state, '*' visited, '.' untouched; followed by the
// per-step cost annotations. Tolerates any trajectory whose states exist in
// the grid.
std::string render_trajectory(const GridScenario& g,
                              const StochasticTransitionSystem& sys,
                              const TrajectoryReport& report);

}  // namespace lexssp
