#pragma once

#include "lexssp/dfa.hpp"
#include "lexssp/fltl.hpp"

namespace lexssp {

// Compiles a formula to a complete DFA over 2^ap: negation normal form,
// tableau expansion of U/R into one-step unfoldings, an obligation-set NFA
// whose states accept iff every obligation holds of the empty suffix, then
// subset construction and minimization. Every atom of f must appear in ap.
// Throws CapacityError when the subset construction exceeds stateCap.
Dfa to_dfa(const FltlPtr& f, const std::vector<std::string>& ap,
           int stateCap = 100000);

}  // namespace lexssp
