#include "lexssp/translate.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "lexssp/errors.hpp"

namespace lexssp {

namespace {

// Negation normal form node kinds. NEXT is the strong next (false at the end
// of the word), WNEXT the weak one (true at the end); UNTIL and RELEASE are
// duals under negation.
enum class Nk { TT, FF, LitPos, LitNeg, And, Or, Next, WNext, Until, Release };

struct Node {
  Nk kind;
  int atom = -1;  // LitPos/LitNeg
  int a = -1, b = -1;
};

// Hash-consed NNF arena; node ids are deterministic in construction order.
class Arena {
 public:
  int intern(Nk kind, int atom, int a, int b) {
    // Identity simplifications keep obligation sets small.
    if (kind == Nk::And) {
      if (a == tt_ || b == ff_) return b;
      if (b == tt_ || a == ff_) return a;
      if (a == b) return a;
      if (a > b) std::swap(a, b);
    }
    if (kind == Nk::Or) {
      if (a == ff_ || b == tt_) return b;
      if (b == ff_ || a == tt_) return a;
      if (a == b) return a;
      if (a > b) std::swap(a, b);
    }
    auto key = std::make_tuple(kind, atom, a, b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({kind, atom, a, b});
    memo_.emplace(key, id);
    return id;
  }

  Arena() {
    tt_ = intern(Nk::TT, -1, -1, -1);
    ff_ = intern(Nk::FF, -1, -1, -1);
    alive_ = intern(Nk::Until, -1, tt_, tt_);
    empty_ = intern(Nk::Release, -1, ff_, ff_);
  }

  const Node& at(int id) const { return nodes_[id]; }
  int tt() const { return tt_; }
  int ff() const { return ff_; }
  // True exactly on nonempty suffixes; tags strong next obligations.
  int alive() const { return alive_; }
  // True exactly on the empty suffix; tags weak next obligations.
  int empty() const { return empty_; }

  // Does the node hold of the empty suffix? Drives NFA-state acceptance.
  bool eps(int id) const {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case Nk::TT:
      case Nk::LitNeg:
      case Nk::WNext:
      case Nk::Release:
        return true;
      case Nk::FF:
      case Nk::LitPos:
      case Nk::Next:
      case Nk::Until:
        return false;
      case Nk::And:
        return eps(n.a) && eps(n.b);
      case Nk::Or:
        return eps(n.a) || eps(n.b);
    }
    return false;
  }

 private:
  std::vector<Node> nodes_;
  std::map<std::tuple<Nk, int, int, int>, int> memo_;
  int tt_, ff_, alive_, empty_;
};

int to_nnf(const FltlPtr& f, bool positive, Arena& arena,
           const std::vector<std::string>& ap) {
  switch (f->op) {
    case FltlOp::True:
      return positive ? arena.tt() : arena.ff();
    case FltlOp::False:
      return positive ? arena.ff() : arena.tt();
    case FltlOp::Atom: {
      auto it = std::find(ap.begin(), ap.end(), f->atom);
      if (it == ap.end())
        throw InputError("undeclared proposition '" + f->atom + "'");
      int idx = static_cast<int>(it - ap.begin());
      return arena.intern(positive ? Nk::LitPos : Nk::LitNeg, idx, -1, -1);
    }
    case FltlOp::Not:
      return to_nnf(f->lhs, !positive, arena, ap);
    case FltlOp::And: {
      int a = to_nnf(f->lhs, positive, arena, ap);
      int b = to_nnf(f->rhs, positive, arena, ap);
      return arena.intern(positive ? Nk::And : Nk::Or, -1, a, b);
    }
    case FltlOp::Or: {
      int a = to_nnf(f->lhs, positive, arena, ap);
      int b = to_nnf(f->rhs, positive, arena, ap);
      return arena.intern(positive ? Nk::Or : Nk::And, -1, a, b);
    }
    case FltlOp::Next:
      // not X phi == WX not phi on finite words.
      return arena.intern(positive ? Nk::Next : Nk::WNext, -1,
                          to_nnf(f->lhs, positive, arena, ap), -1);
    case FltlOp::Until: {
      int a = to_nnf(f->lhs, positive, arena, ap);
      int b = to_nnf(f->rhs, positive, arena, ap);
      return arena.intern(positive ? Nk::Until : Nk::Release, -1, a, b);
    }
    case FltlOp::Implies:
    case FltlOp::Iff:
    case FltlOp::Eventually:
    case FltlOp::Always:
      return to_nnf(desugar(f), positive, arena, ap);
  }
  throw InputError("unknown formula node");
}

using ObligationSet = std::vector<int>;  // sorted node ids

ObligationSet merge(const ObligationSet& a, const ObligationSet& b) {
  ObligationSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void dedupe(std::vector<ObligationSet>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// One-step decomposition of a node against a letter: the list of alternative
// obligation sets for the next position. Empty list means the node cannot be
// satisfied on this letter.
//   X psi   deposits  psi & alive   (fails if the word ends here)
//   WX psi  deposits  psi | empty   (holds if the word ends here)
//   a U b  == b | (a & X(a U b));  a R b == b & (a | WX(a R b)).
class Stepper {
 public:
  explicit Stepper(Arena& arena) : arena_(arena) {}

  const std::vector<ObligationSet>& step(int id, Letter sigma) {
    auto key = std::make_pair(id, sigma);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<ObligationSet> out;
    const Node& n = arena_.at(id);
    switch (n.kind) {
      case Nk::TT:
        out.push_back({});
        break;
      case Nk::FF:
        break;
      case Nk::LitPos:
        if (sigma & (Letter{1} << n.atom)) out.push_back({});
        break;
      case Nk::LitNeg:
        if (!(sigma & (Letter{1} << n.atom))) out.push_back({});
        break;
      case Nk::And: {
        const auto& la = step(n.a, sigma);
        const auto& lb = step(n.b, sigma);
        for (const auto& x : la)
          for (const auto& y : lb) out.push_back(merge(x, y));
        dedupe(out);
        break;
      }
      case Nk::Or: {
        const auto& la = step(n.a, sigma);
        const auto& lb = step(n.b, sigma);
        out = la;
        out.insert(out.end(), lb.begin(), lb.end());
        dedupe(out);
        break;
      }
      case Nk::Next:
        out.push_back({arena_.intern(Nk::And, -1, n.a, arena_.alive())});
        break;
      case Nk::WNext:
        out.push_back({arena_.intern(Nk::Or, -1, n.a, arena_.empty())});
        break;
      case Nk::Until: {
        const auto& now = step(n.b, sigma);
        out = now;
        int carry = arena_.intern(Nk::And, -1, id, arena_.alive());
        for (const auto& x : step(n.a, sigma)) out.push_back(merge(x, {carry}));
        dedupe(out);
        break;
      }
      case Nk::Release: {
        const auto& now = step(n.b, sigma);
        int carry = arena_.intern(Nk::Or, -1, id, arena_.empty());
        std::vector<ObligationSet> rest = step(n.a, sigma);
        rest.push_back({carry});
        for (const auto& x : now)
          for (const auto& y : rest) out.push_back(merge(x, y));
        dedupe(out);
        break;
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  Arena& arena_;
  std::map<std::pair<int, Letter>, std::vector<ObligationSet>> memo_;
};

}  // namespace

Dfa to_dfa(const FltlPtr& f, const std::vector<std::string>& ap, int stateCap) {
  if (static_cast<int>(ap.size()) > Dfa::kMaxAp)
    throw InputError("proposition count exceeds the supported cap");
  Arena arena;
  int root = to_nnf(desugar(f), true, arena, ap);
  Stepper stepper(arena);
  int numLetters = 1 << static_cast<int>(ap.size());

  // NFA states are obligation sets; DFA states are sets of NFA states.
  std::map<ObligationSet, int> nfaId;
  std::vector<ObligationSet> nfaStates;
  std::vector<char> nfaAccepting;
  auto internNfa = [&](const ObligationSet& s) {
    auto it = nfaId.find(s);
    if (it != nfaId.end()) return it->second;
    int id = static_cast<int>(nfaStates.size());
    nfaId.emplace(s, id);
    nfaStates.push_back(s);
    bool acc = true;
    for (int ob : s) acc = acc && arena.eps(ob);
    nfaAccepting.push_back(acc ? 1 : 0);
    return id;
  };

  using DfaKey = std::vector<int>;  // sorted NFA state ids
  std::map<DfaKey, int> dfaId;
  std::vector<DfaKey> dfaStates;

  auto internDfa = [&](DfaKey key) {
    auto it = dfaId.find(key);
    if (it != dfaId.end()) return it->second;
    int id = static_cast<int>(dfaStates.size());
    if (id >= stateCap)
      throw CapacityError("automaton construction exceeded the state cap of " +
                          std::to_string(stateCap));
    dfaId.emplace(key, id);
    dfaStates.push_back(std::move(key));
    return id;
  };

  Dfa d;
  d.ap = ap;
  int start = internDfa({internNfa({root})});
  d.initial = start;
  std::vector<std::vector<int>> trans;
  for (std::size_t i = 0; i < dfaStates.size(); ++i) {
    trans.emplace_back(numLetters, -1);
    DfaKey members = dfaStates[i];  // copy: dfaStates grows below
    for (Letter sigma = 0; sigma < static_cast<Letter>(numLetters); ++sigma) {
      std::vector<int> nextMembers;
      for (int m : members) {
        // Successor obligation sets: cross product of the per-obligation
        // alternatives within this NFA state.
        std::vector<ObligationSet> acc = {{}};
        for (int ob : nfaStates[m]) {
          const auto& alts = stepper.step(ob, sigma);
          std::vector<ObligationSet> next;
          for (const auto& partial : acc)
            for (const auto& alt : alts) next.push_back(merge(partial, alt));
          dedupe(next);
          acc = std::move(next);
          if (acc.empty()) break;
          if (acc.size() > 100000)
            throw CapacityError("transition expansion exceeded the branch cap");
        }
        for (const auto& s : acc) nextMembers.push_back(internNfa(s));
      }
      std::sort(nextMembers.begin(), nextMembers.end());
      nextMembers.erase(std::unique(nextMembers.begin(), nextMembers.end()),
                        nextMembers.end());
      trans[i][sigma] = internDfa(std::move(nextMembers));
    }
  }

  d.numStates = static_cast<int>(dfaStates.size());
  d.trans = std::move(trans);
  d.accepting.assign(d.numStates, 0);
  for (int q = 0; q < d.numStates; ++q)
    for (int m : dfaStates[q])
      if (nfaAccepting[m]) d.accepting[q] = 1;
  d.sink = find_rejecting_sink(d);
  return minimize_dfa(d);
}

}  // namespace lexssp
