// Python bindings: a thin functional surface over the planning library.
// Formulas and scenarios travel as text (JSON for scenarios and automata),
// results come back as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "lexssp/dfa.hpp"
#include "lexssp/errors.hpp"
#include "lexssp/fltl.hpp"
#include "lexssp/lex_solver.hpp"
#include "lexssp/scenario.hpp"
#include "lexssp/translate.hpp"
#include "lexssp/version.hpp"

namespace py = pybind11;

namespace {

lexssp::Dfa translate_text(const std::string& text,
                           std::vector<std::string> ap) {
  lexssp::FltlPtr f = lexssp::parse_fltl(text, ap);
  if (ap.empty()) {
    ap = lexssp::atoms_of(f);
    f = lexssp::parse_fltl(text, ap);
  }
  return lexssp::to_dfa(f, ap);
}

py::dict report_dict(const lexssp::StochasticTransitionSystem& base,
                     const lexssp::TrajectoryReport& r) {
  py::dict d;
  d["seed"] = r.seed;
  std::vector<std::string> states;
  for (lexssp::StateId s : r.baseStates) states.push_back(base.states[s]);
  d["states"] = states;
  std::vector<std::string> actions;
  for (lexssp::ActionId a : r.actions) actions.push_back(base.actions[a]);
  d["actions"] = actions;
  d["automaton_states"] = r.automatonStates;
  d["realized_costs"] = r.realizedCosts;
  d["satisfied"] = r.satisfied;
  d["rejected"] = r.rejected;
  d["timed_out"] = r.timedOut;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lexssp, m) {
  m.doc() =
      "Lexicographically optimal policies for stochastic shortest path "
      "problems with peak- and total-cost objectives under finite-trace "
      "temporal constraints";
  m.attr("__version__") = std::string(lexssp::kVersion);

  py::register_exception<lexssp::CapacityError>(m, "CapacityError");
  py::register_exception<lexssp::InputError>(m, "InputError");

  m.def(
      "canonical_formula",
      [](const std::string& text, const std::vector<std::string>& ap) {
        return lexssp::to_string(lexssp::parse_fltl(text, ap));
      },
      py::arg("text"), py::arg("ap") = std::vector<std::string>{},
      "Parse a temporal formula and return its fully parenthesized form.");

  m.def(
      "formula_atoms",
      [](const std::string& text) {
        return lexssp::atoms_of(lexssp::parse_fltl(text));
      },
      py::arg("text"), "Sorted atomic propositions appearing in the formula.");

  m.def(
      "evaluate_formula",
      [](const std::string& text,
         const std::vector<std::vector<std::string>>& word,
         std::vector<std::string> ap) {
        lexssp::FltlPtr f = lexssp::parse_fltl(text, ap);
        if (ap.empty()) {
          ap = lexssp::atoms_of(f);
          f = lexssp::parse_fltl(text, ap);
        }
        lexssp::Word w;
        for (const auto& props : word)
          w.push_back(lexssp::make_letter(props, ap));
        return lexssp::evaluate(f, w, ap);
      },
      py::arg("text"), py::arg("word"),
      py::arg("ap") = std::vector<std::string>{},
      "Finite-trace satisfaction of a formula on a word given as a list of "
      "proposition-name lists.");

  m.def(
      "translate_formula",
      [](const std::string& text, const std::vector<std::string>& ap,
         bool dot) {
        lexssp::Dfa d = translate_text(text, ap);
        return dot ? lexssp::to_dot(d) : lexssp::dfa_to_json(d);
      },
      py::arg("text"), py::arg("ap") = std::vector<std::string>{},
      py::arg("dot") = false,
      "Compile a formula into a deterministic finite automaton, returned as "
      "JSON (or Graphviz DOT).");

  m.def(
      "canonical_scenario_json",
      [](const std::string& text) {
        return lexssp::scenario_to_json(lexssp::scenario_from_json(text));
      },
      py::arg("text"),
      "Parse a scenario and return its canonical serialization.");

  m.def(
      "validate_scenario_json",
      [](const std::string& text) {
        std::vector<std::string> out;
        try {
          for (const auto& d :
               lexssp::validate_scenario(lexssp::scenario_from_json(text)))
            out.push_back(d.location + ": " + d.message);
        } catch (const lexssp::InputError& e) {
          // Unparseable documents are reported, not thrown: callers use this
          // function to ask what is wrong with untrusted input.
          out.push_back(e.what());
        }
        return out;
      },
      py::arg("text"),
      "Diagnostics for a scenario document; empty when it is solvable.");

  m.def(
      "bundled_scenario",
      [](int index) {
        if (index == 1)
          return lexssp::scenario_to_json(lexssp::experiment_1_scenario());
        if (index == 2)
          return lexssp::scenario_to_json(lexssp::experiment_2_scenario());
        throw lexssp::InputError("bundled scenarios are numbered 1 and 2");
      },
      py::arg("index"), "JSON text of a bundled benchmark scenario.");

  m.def(
      "solve_scenario_json",
      [](const std::string& text) {
        lexssp::Scenario sc = lexssp::scenario_from_json(text);
        lexssp::SolvedScenario sv = lexssp::solve_scenario(sc);
        py::dict out;
        out["product_states"] = sv.prod.sys.num_states();
        out["objectives"] = sv.sol.numObjectives;
        std::vector<double> vals;
        for (int k = 0; k < sv.sol.numObjectives; ++k)
          vals.push_back(sv.sol.value_at_start(sv.prod, k));
        out["start_values"] = vals;
        out["satisfaction"] = lexssp::policy_satisfaction(sv.prod, sv.sol);
        out["warnings"] = sv.sol.warnings;
        return out;
      },
      py::arg("text"),
      "Solve a scenario; returns start values per objective and the exact "
      "satisfaction probability of the computed policy.");

  m.def(
      "simulate_scenario_json",
      [](const std::string& text, std::uint64_t seed, int samples) {
        lexssp::Scenario sc = lexssp::scenario_from_json(text);
        lexssp::SolvedScenario sv = lexssp::solve_scenario(sc);
        lexssp::SimulationResult res =
            lexssp::run_policy(sv.prod, sv.sol, seed, samples);
        py::list out;
        for (const auto& r : res.trajectories)
          out.append(report_dict(sc.system, r));
        return out;
      },
      py::arg("text"), py::arg("seed") = 0, py::arg("samples") = 1,
      "Solve a scenario and run the policy; returns one dict per sampled "
      "trajectory, deterministically derived from the seed.");
}
