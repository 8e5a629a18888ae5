#include "lexssp/render.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace lexssp {

std::string render_trajectory(const GridScenario& g,
                              const StochasticTransitionSystem& sys,
                              const TrajectoryReport& report) {
  std::map<std::string, Cell> cellOf;
  for (Cell c : g.open_cells()) cellOf[g.name_of(c)] = c;

  std::vector<std::string> rows(g.height, std::string(g.width, '.'));
  for (int r = 0; r < g.height; ++r)
    for (int c = 0; c < g.width; ++c)
      if (!g.is_open({c, r})) rows[r][c] = '#';

  auto mark = [&](StateId s, char ch) {
    if (s < 0 || s >= sys.num_states()) return;
    auto it = cellOf.find(sys.states[s]);
    if (it == cellOf.end()) return;
    rows[it->second.second][it->second.first] = ch;
  };
  for (StateId s : report.baseStates) mark(s, '*');
  if (!report.baseStates.empty()) {
    mark(report.baseStates.back(), 'G');
    mark(report.baseStates.front(), 'S');
  }

  std::ostringstream os;
  for (const auto& row : rows) os << row << '\n';

  os << "steps: " << report.actions.size();
  if (report.satisfied) os << "  satisfied";
  if (report.rejected) os << "  rejected";
  if (report.timedOut) os << "  timed-out";
  os << '\n';
  char buf[64];
  for (std::size_t k = 0; k < report.realizedCosts.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%g", report.realizedCosts[k]);
    os << "objective " << k << " realized cost: " << buf << '\n';
  }
  auto entered_cost = [&](StateId s, const std::map<std::string, double>& m,
                          double def) {
    auto it = s >= 0 && s < sys.num_states() ? m.find(sys.states[s]) : m.end();
    return it == m.end() ? def : it->second;
  };
  for (std::size_t t = 0; t < report.actions.size(); ++t) {
    StateId from = report.baseStates[t];
    StateId to = report.baseStates[t + 1];
    os << "  " << (t + 1) << ". "
       << (from >= 0 && from < sys.num_states() ? sys.states[from] : "?") << " -"
       << (report.actions[t] >= 0 && report.actions[t] < sys.num_actions()
               ? sys.actions[report.actions[t]]
               : "?")
       << "-> " << (to >= 0 && to < sys.num_states() ? sys.states[to] : "?");
    if (g.hasMaxObjective) {
      std::snprintf(buf, sizeof(buf), "%g",
                    entered_cost(to, g.maxCostMap, g.maxCostDefault));
      os << "  max-cost " << buf;
    }
    if (g.hasSumObjective) {
      std::snprintf(buf, sizeof(buf), "%g",
                    entered_cost(to, g.sumCostMap, g.sumCostDefault));
      os << "  sum-cost " << buf;
    }
    if (t + 1 < report.automatonStates.size() &&
        report.automatonStates[t] != report.automatonStates[t + 1])
      os << "  [q" << report.automatonStates[t] << " -> q"
         << report.automatonStates[t + 1] << "]";
    os << '\n';
  }
  return os.str();
}

}  // namespace lexssp
