#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace lexssp {

enum class FltlOp {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  Until,
  Eventually,
  Always,
};

struct FltlFormula;
using FltlPtr = std::shared_ptr<const FltlFormula>;

struct FltlFormula {
  FltlOp op;
  std::string atom;  // Atom only
  FltlPtr lhs, rhs;  // unary ops use lhs

  static FltlPtr make_true();
  static FltlPtr make_false();
  static FltlPtr make_atom(std::string name);
  static FltlPtr make_unary(FltlOp op, FltlPtr f);
  static FltlPtr make_binary(FltlOp op, FltlPtr l, FltlPtr r);
};

// Letters are bitmasks over a declared AP ordering.
using Letter = std::uint32_t;
using Word = std::vector<Letter>;

// Concrete syntax: atoms are identifiers; `true false ! & | -> <-> X F G U`;
// parentheses group. Binding tightness: unary (!, X, F, G) > U > & > | >
// -> and <->; U, -> and <-> are right-associative. Errors carry line:column.
// When `ap` is nonempty, atoms outside it are rejected.
FltlPtr parse_fltl(const std::string& text, const std::vector<std::string>& ap = {});

// Canonical text form (fully parenthesized infix); parses back to an equal AST.
std::string to_string(const FltlPtr& f);
bool equal(const FltlPtr& a, const FltlPtr& b);

// Collects the atoms appearing in f, sorted.
std::vector<std::string> atoms_of(const FltlPtr& f);

// Rewrites derived operators: F p == true U p, G p == !(true U !p),
// p -> q == !p | q, p <-> q == (p -> q) & (q -> p). Output uses only
// True/False/Atom/Not/And/Or/Next/Until.
FltlPtr desugar(const FltlPtr& f);

// Finite-trace satisfaction (sigma, i) |= f for a word over the given AP
// ordering. position must be < word.size(); the word must be nonempty.
// X f is false at the last position; p U q needs q at some position >= i.
bool evaluate(const FltlPtr& f, const Word& word,
              const std::vector<std::string>& ap, std::size_t position = 0);

// Builds the bitmask letter for a set of proposition names.
Letter make_letter(const std::vector<std::string>& props,
                   const std::vector<std::string>& ap);

}  // namespace lexssp
