#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexssp/fltl.hpp"

namespace lexssp {

// Complete DFA over the alphabet 2^AP. Letters are bitmask indices into a
// dense transition table, so |AP| is capped (see kMaxAp). trans entries of
// -1 mark missing transitions of a partial automaton; add_rejecting_sink
// completes such automata.
struct Dfa {
  static constexpr int kMaxAp = 16;

  std::vector<std::string> ap;
  int numStates = 0;
  int initial = 0;
  std::vector<std::vector<int>> trans;  // [state][letter] -> state or -1
  std::vector<char> accepting;
  std::optional<int> sink;  // designated rejecting sink, if any

  int num_letters() const { return 1 << static_cast<int>(ap.size()); }
  bool is_total() const;

  // Runs the automaton; a missing transition rejects. The empty word is
  // accepted iff the initial state is accepting.
  bool accepts(const Word& word) const;
};

// Detects a rejecting sink: the unique non-accepting state all of whose
// transitions are self-loops. Returns nullopt when none or several exist.
std::optional<int> find_rejecting_sink(const Dfa& d);

// Completes a partial DFA by redirecting every missing transition to a new
// absorbing rejecting state. A total input is returned unchanged unless
// force is set, which appends an (unreachable) sink anyway.
Dfa add_rejecting_sink(const Dfa& d, bool force = false);

// Unreachable-state removal plus Moore partition refinement. The result is
// the minimal language-equivalent DFA with states renumbered canonically
// (BFS from the initial state in letter order). Requires a total input.
// The sink designation survives when the merged class is rejecting-absorbing.
Dfa minimize_dfa(const Dfa& d);

std::string to_dot(const Dfa& d);
std::string dfa_to_json(const Dfa& d);
Dfa dfa_from_json(const std::string& text);

}  // namespace lexssp
