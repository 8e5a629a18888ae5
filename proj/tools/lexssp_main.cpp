// Command-line front end: formula translation, scenario solving, seeded
// simulation, exact evaluation, and ASCII rendering.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 capacity limit.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lexssp/dfa.hpp"
#include "lexssp/errors.hpp"
#include "lexssp/fltl.hpp"
#include "lexssp/lex_solver.hpp"
#include "lexssp/render.hpp"
#include "lexssp/scenario.hpp"
#include "lexssp/translate.hpp"
#include "lexssp/version.hpp"

namespace {

using lexssp::InputError;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& outPath, const std::string& text) {
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(outPath, std::ios::binary);
  if (!out) throw InputError(outPath + ": cannot open for writing");
  out << text;
}

nlohmann::ordered_json report_to_json(const lexssp::StochasticTransitionSystem& base,
                                      const lexssp::TrajectoryReport& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  auto states = nlohmann::ordered_json::array();
  for (lexssp::StateId s : r.baseStates) states.push_back(base.states[s]);
  j["states"] = std::move(states);
  auto actions = nlohmann::ordered_json::array();
  for (lexssp::ActionId a : r.actions) actions.push_back(base.actions[a]);
  j["actions"] = std::move(actions);
  j["automaton_states"] = r.automatonStates;
  j["realized_costs"] = r.realizedCosts;
  j["satisfied"] = r.satisfied;
  j["rejected"] = r.rejected;
  j["timed_out"] = r.timedOut;
  return j;
}

lexssp::TrajectoryReport report_from_json(
    const lexssp::StochasticTransitionSystem& base, const nlohmann::json& j,
    int lineNo) {
  auto fail = [&](const std::string& msg) -> InputError {
    return InputError("trajectory line " + std::to_string(lineNo) + ": " + msg);
  };
  lexssp::TrajectoryReport r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& name : j.at("states"))
      r.baseStates.push_back(base.state_index(name.get<std::string>()));
    for (const auto& name : j.at("actions"))
      r.actions.push_back(base.action_index(name.get<std::string>()));
    r.automatonStates = j.at("automaton_states").get<std::vector<int>>();
    r.realizedCosts = j.at("realized_costs").get<std::vector<double>>();
    r.satisfied = j.at("satisfied").get<bool>();
    r.rejected = j.at("rejected").get<bool>();
    r.timedOut = j.at("timed_out").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  } catch (const InputError& e) {
    throw fail(e.what());
  }
  if (r.baseStates.empty()) throw fail("empty state sequence");
  if (r.actions.size() + 1 != r.baseStates.size())
    throw fail("action count must be one less than state count");
  return r;
}

void print_summary(std::ostream& os, const lexssp::RunStats& stats) {
  os << "samples: " << stats.samples << "\n";
  os << "satisfied: " << stats.satisfied << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", stats.satisfactionRate);
  os << "satisfaction rate: " << buf << "\n";
  for (std::size_t k = 0; k < stats.meanCosts.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g", stats.meanCosts[k]);
    os << "mean cost[" << k << "] (satisfied runs): " << buf << "\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Lexicographic stochastic shortest path planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lexssp::kVersion));

  // translate
  std::string formulaText;
  std::vector<std::string> apList;
  bool emitDot = false;
  std::string outPath;
  auto* translate = app.add_subcommand(
      "translate", "Compile a temporal formula over finite words into a DFA");
  translate->add_option("formula", formulaText, "Formula text, e.g. \"F p\"")
      ->required();
  translate->add_option("--ap", apList, "Atomic propositions (repeat or comma-separate)")
      ->delimiter(',');
  translate->add_flag("--dot", emitDot, "Emit Graphviz DOT instead of JSON");
  translate->add_option("-o,--out", outPath, "Output file (default: stdout)");
  translate->callback([&] {
    std::vector<std::string> ap = apList;
    lexssp::FltlPtr f = lexssp::parse_fltl(formulaText, ap);
    if (ap.empty()) {
      // No declared propositions: use the formula's own atoms.
      ap = lexssp::atoms_of(f);
      f = lexssp::parse_fltl(formulaText, ap);
    }
    lexssp::Dfa d = lexssp::to_dfa(f, ap);
    write_output(outPath, emitDot ? lexssp::to_dot(d) : lexssp::dfa_to_json(d));
  });

  // solve
  std::string scenarioPath;
  std::string archiveDir;
  auto* solve = app.add_subcommand("solve", "Solve a scenario and write a policy archive");
  solve->add_option("scenario", scenarioPath, "Scenario JSON file")->required();
  solve->add_option("-o,--out", archiveDir, "Archive directory to create")->required();
  solve->callback([&] {
    lexssp::Scenario sc = lexssp::load_scenario(scenarioPath);
    lexssp::SolvedScenario solved = lexssp::solve_scenario(sc);
    for (const auto& w : solved.sol.warnings) std::cerr << "warning: " << w << "\n";
    lexssp::write_solution_archive(archiveDir, solved.prod, solved.sol, solved.cfg);
    std::cout << "product states: " << solved.prod.sys.num_states() << "\n";
    std::cout << "objectives: " << solved.sol.numObjectives << "\n";
    char buf[64];
    for (int k = 0; k < solved.sol.numObjectives; ++k) {
      std::snprintf(buf, sizeof buf, "%.10g",
                    solved.sol.value_at_start(solved.prod, k));
      std::cout << "start value[" << k << "]: " << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "%.9f",
                  lexssp::policy_satisfaction(solved.prod, solved.sol));
    std::cout << "exact satisfaction probability: " << buf << "\n";
    std::cout << "archive: " << archiveDir << "\n";
  });

  // simulate
  std::string simScenario;
  std::string simArchive;
  std::uint64_t seed = 0;
  int nSamples = 1;
  std::string simOut;
  auto* simulate = app.add_subcommand(
      "simulate", "Run an archived policy and emit trajectories as JSON lines");
  simulate->add_option("scenario", simScenario, "Scenario JSON file")->required();
  simulate->add_option("archive", simArchive, "Policy archive directory")->required();
  simulate->add_option("--seed", seed, "Root RNG seed")->default_val(0);
  simulate->add_option("-n,--samples", nSamples, "Number of trajectories")
      ->default_val(1);
  simulate->add_option("-o,--out", simOut, "Output file (default: stdout)");
  simulate->callback([&] {
    lexssp::Scenario sc = lexssp::load_scenario(simScenario);
    lexssp::CompiledScenario comp = lexssp::compile_scenario(sc);
    lexssp::ArchivedPolicy pol = lexssp::read_solution_archive(simArchive, comp.prod);
    lexssp::SimulationResult res =
        lexssp::run_archived_policy(comp.prod, pol, seed, nSamples);
    std::ostringstream lines;
    for (const auto& r : res.trajectories)
      lines << report_to_json(sc.system, r).dump() << "\n";
    write_output(simOut, lines.str());
    print_summary(std::cerr, res.stats);
  });

  // eval
  std::string evalScenario;
  std::string evalArchive;
  auto* evalCmd = app.add_subcommand(
      "eval", "Exact satisfaction probability and start values of an archived policy");
  evalCmd->add_option("scenario", evalScenario, "Scenario JSON file")->required();
  evalCmd->add_option("archive", evalArchive, "Policy archive directory")->required();
  evalCmd->callback([&] {
    lexssp::Scenario sc = lexssp::load_scenario(evalScenario);
    lexssp::CompiledScenario comp = lexssp::compile_scenario(sc);
    lexssp::ArchivedPolicy pol = lexssp::read_solution_archive(evalArchive, comp.prod);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f",
                  lexssp::archived_satisfaction(comp.prod, pol));
    std::cout << "exact satisfaction probability: " << buf << "\n";
    for (std::size_t k = 0; k < pol.startValues.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.10g", pol.startValues[k]);
      std::cout << "start value[" << k << "]: " << buf << "\n";
    }
  });

  // render
  std::string renderScenario;
  std::string reportPath;
  auto* render = app.add_subcommand(
      "render", "Draw grid trajectories from a JSON-lines report");
  render->add_option("scenario", renderScenario, "Scenario JSON file (grid-based)")
      ->required();
  render->add_option("reports", reportPath, "Trajectory report file (JSON lines)")
      ->required();
  render->callback([&] {
    lexssp::Scenario sc = lexssp::load_scenario(renderScenario);
    if (!sc.grid)
      throw InputError(renderScenario + ": render needs a grid-based scenario");
    std::istringstream in(read_file(reportPath));
    std::string line;
    int lineNo = 0;
    bool first = true;
    while (std::getline(in, line)) {
      ++lineNo;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw InputError("trajectory line " + std::to_string(lineNo) + ": " +
                         e.what());
      }
      lexssp::TrajectoryReport r = report_from_json(sc.system, j, lineNo);
      if (!first) std::cout << "\n";
      first = false;
      std::cout << lexssp::render_trajectory(*sc.grid, sc.system, r);
    }
  });

  // bundled scenarios
  std::string ex1Out;
  auto* ex1 = app.add_subcommand("ex1", "Print the bundled single-objective benchmark");
  ex1->add_option("-o,--out", ex1Out, "Output file (default: stdout)");
  ex1->callback([&] {
    write_output(ex1Out, lexssp::scenario_to_json(lexssp::experiment_1_scenario()));
  });
  std::string ex2Out;
  auto* ex2 = app.add_subcommand(
      "ex2", "Print the bundled two-objective benchmark with a temporal constraint");
  ex2->add_option("-o,--out", ex2Out, "Output file (default: stdout)");
  ex2->callback([&] {
    write_output(ex2Out, lexssp::scenario_to_json(lexssp::experiment_2_scenario()));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lexssp::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const lexssp::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
