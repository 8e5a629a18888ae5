#include "lexssp/fltl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "lexssp/errors.hpp"

namespace lexssp {

FltlPtr FltlFormula::make_true() {
  auto f = std::make_shared<FltlFormula>();
  f->op = FltlOp::True;
  return f;
}

FltlPtr FltlFormula::make_false() {
  auto f = std::make_shared<FltlFormula>();
  f->op = FltlOp::False;
  return f;
}

FltlPtr FltlFormula::make_atom(std::string name) {
  auto f = std::make_shared<FltlFormula>();
  f->op = FltlOp::Atom;
  f->atom = std::move(name);
  return f;
}

FltlPtr FltlFormula::make_unary(FltlOp op, FltlPtr sub) {
  auto f = std::make_shared<FltlFormula>();
  f->op = op;
  f->lhs = std::move(sub);
  return f;
}

FltlPtr FltlFormula::make_binary(FltlOp op, FltlPtr l, FltlPtr r) {
  auto f = std::make_shared<FltlFormula>();
  f->op = op;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

namespace {

enum class Tok { End, True, False, Ident, Bang, And, Or, Implies, Iff, Next,
                 Eventually, Always, Until, LParen, RParen };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space();
    int line = line_, col = col_;
    if (pos_ >= text_.size()) return {Tok::End, "", line, col};
    char c = text_[pos_];
    if (c == '(') return take(Tok::LParen, 1, line, col);
    if (c == ')') return take(Tok::RParen, 1, line, col);
    if (c == '!') return take(Tok::Bang, 1, line, col);
    if (c == '&') return take(Tok::And, 1, line, col);
    if (c == '|') return take(Tok::Or, 1, line, col);
    if (c == '-') {
      if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>')
        return take(Tok::Implies, 2, line, col);
      throw ParseError("expected '->'", line, col);
    }
    if (c == '<') {
      if (pos_ + 2 < text_.size() && text_[pos_ + 1] == '-' && text_[pos_ + 2] == '>')
        return take(Tok::Iff, 3, line, col);
      throw ParseError("expected '<->'", line, col);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        advance();
      std::string word = text_.substr(start, pos_ - start);
      if (word == "true") return {Tok::True, word, line, col};
      if (word == "false") return {Tok::False, word, line, col};
      if (word == "X") return {Tok::Next, word, line, col};
      if (word == "F") return {Tok::Eventually, word, line, col};
      if (word == "G") return {Tok::Always, word, line, col};
      if (word == "U") return {Tok::Until, word, line, col};
      return {Tok::Ident, word, line, col};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance();
  }
  Token take(Tok kind, int len, int line, int col) {
    std::string t = text_.substr(pos_, len);
    for (int i = 0; i < len; ++i) advance();
    return {kind, t, line, col};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Recursive descent over the documented precedence chain:
//   iff/implies (lowest, right-assoc) < or < and < until (right-assoc) < unary.
class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& ap)
      : lexer_(text), ap_(ap) {
    cur_ = lexer_.next();
  }

  FltlPtr parse() {
    FltlPtr f = parse_impl();
    if (cur_.kind != Tok::End)
      throw ParseError("unexpected trailing token '" + cur_.text + "'", cur_.line,
                       cur_.column);
    return f;
  }

 private:
  void bump() { cur_ = lexer_.next(); }

  FltlPtr parse_impl() {
    FltlPtr l = parse_or();
    if (cur_.kind == Tok::Implies) {
      bump();
      return FltlFormula::make_binary(FltlOp::Implies, l, parse_impl());
    }
    if (cur_.kind == Tok::Iff) {
      bump();
      return FltlFormula::make_binary(FltlOp::Iff, l, parse_impl());
    }
    return l;
  }

  FltlPtr parse_or() {
    FltlPtr l = parse_and();
    while (cur_.kind == Tok::Or) {
      bump();
      l = FltlFormula::make_binary(FltlOp::Or, l, parse_and());
    }
    return l;
  }

  FltlPtr parse_and() {
    FltlPtr l = parse_until();
    while (cur_.kind == Tok::And) {
      bump();
      l = FltlFormula::make_binary(FltlOp::And, l, parse_until());
    }
    return l;
  }

  FltlPtr parse_until() {
    FltlPtr l = parse_unary();
    if (cur_.kind == Tok::Until) {
      bump();
      return FltlFormula::make_binary(FltlOp::Until, l, parse_until());
    }
    return l;
  }

  FltlPtr parse_unary() {
    switch (cur_.kind) {
      case Tok::Bang:
        bump();
        return FltlFormula::make_unary(FltlOp::Not, parse_unary());
      case Tok::Next:
        bump();
        return FltlFormula::make_unary(FltlOp::Next, parse_unary());
      case Tok::Eventually:
        bump();
        return FltlFormula::make_unary(FltlOp::Eventually, parse_unary());
      case Tok::Always:
        bump();
        return FltlFormula::make_unary(FltlOp::Always, parse_unary());
      default:
        return parse_primary();
    }
  }

  FltlPtr parse_primary() {
    switch (cur_.kind) {
      case Tok::True:
        bump();
        return FltlFormula::make_true();
      case Tok::False:
        bump();
        return FltlFormula::make_false();
      case Tok::Ident: {
        if (!ap_.empty() &&
            std::find(ap_.begin(), ap_.end(), cur_.text) == ap_.end())
          throw ParseError("undeclared proposition '" + cur_.text + "'", cur_.line,
                           cur_.column);
        FltlPtr f = FltlFormula::make_atom(cur_.text);
        bump();
        return f;
      }
      case Tok::LParen: {
        bump();
        FltlPtr f = parse_impl();
        if (cur_.kind != Tok::RParen)
          throw ParseError("expected ')'", cur_.line, cur_.column);
        bump();
        return f;
      }
      case Tok::End:
        throw ParseError("unexpected end of input", cur_.line, cur_.column);
      default:
        throw ParseError("unexpected token '" + cur_.text + "'", cur_.line,
                         cur_.column);
    }
  }

  Lexer lexer_;
  Token cur_;
  const std::vector<std::string>& ap_;
};

}  // namespace

FltlPtr parse_fltl(const std::string& text, const std::vector<std::string>& ap) {
  return Parser(text, ap).parse();
}

std::string to_string(const FltlPtr& f) {
  switch (f->op) {
    case FltlOp::True:
      return "true";
    case FltlOp::False:
      return "false";
    case FltlOp::Atom:
      return f->atom;
    case FltlOp::Not:
      return "(!" + to_string(f->lhs) + ")";
    case FltlOp::Next:
      return "(X " + to_string(f->lhs) + ")";
    case FltlOp::Eventually:
      return "(F " + to_string(f->lhs) + ")";
    case FltlOp::Always:
      return "(G " + to_string(f->lhs) + ")";
    case FltlOp::And:
      return "(" + to_string(f->lhs) + " & " + to_string(f->rhs) + ")";
    case FltlOp::Or:
      return "(" + to_string(f->lhs) + " | " + to_string(f->rhs) + ")";
    case FltlOp::Implies:
      return "(" + to_string(f->lhs) + " -> " + to_string(f->rhs) + ")";
    case FltlOp::Iff:
      return "(" + to_string(f->lhs) + " <-> " + to_string(f->rhs) + ")";
    case FltlOp::Until:
      return "(" + to_string(f->lhs) + " U " + to_string(f->rhs) + ")";
  }
  return "";
}

bool equal(const FltlPtr& a, const FltlPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  if (a->op == FltlOp::Atom) return a->atom == b->atom;
  if (a->lhs || b->lhs)
    if (!equal(a->lhs, b->lhs)) return false;
  if (a->rhs || b->rhs)
    if (!equal(a->rhs, b->rhs)) return false;
  return true;
}

namespace {

void collect_atoms(const FltlPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->op == FltlOp::Atom) out.insert(f->atom);
  collect_atoms(f->lhs, out);
  collect_atoms(f->rhs, out);
}

}  // namespace

std::vector<std::string> atoms_of(const FltlPtr& f) {
  std::set<std::string> s;
  collect_atoms(f, s);
  return {s.begin(), s.end()};
}

FltlPtr desugar(const FltlPtr& f) {
  using F = FltlFormula;
  switch (f->op) {
    case FltlOp::True:
    case FltlOp::False:
    case FltlOp::Atom:
      return f;
    case FltlOp::Not:
      return F::make_unary(FltlOp::Not, desugar(f->lhs));
    case FltlOp::Next:
      return F::make_unary(FltlOp::Next, desugar(f->lhs));
    case FltlOp::And:
      return F::make_binary(FltlOp::And, desugar(f->lhs), desugar(f->rhs));
    case FltlOp::Or:
      return F::make_binary(FltlOp::Or, desugar(f->lhs), desugar(f->rhs));
    case FltlOp::Until:
      return F::make_binary(FltlOp::Until, desugar(f->lhs), desugar(f->rhs));
    case FltlOp::Implies:
      return F::make_binary(FltlOp::Or,
                            F::make_unary(FltlOp::Not, desugar(f->lhs)),
                            desugar(f->rhs));
    case FltlOp::Iff: {
      FltlPtr l = desugar(f->lhs), r = desugar(f->rhs);
      return F::make_binary(
          FltlOp::And,
          F::make_binary(FltlOp::Or, F::make_unary(FltlOp::Not, l), r),
          F::make_binary(FltlOp::Or, F::make_unary(FltlOp::Not, r), l));
    }
    case FltlOp::Eventually:
      return F::make_binary(FltlOp::Until, F::make_true(), desugar(f->lhs));
    case FltlOp::Always:
      // G p == !(true U !p)
      return F::make_unary(
          FltlOp::Not,
          F::make_binary(FltlOp::Until, F::make_true(),
                         F::make_unary(FltlOp::Not, desugar(f->lhs))));
  }
  return f;
}

bool evaluate(const FltlPtr& f, const Word& word,
              const std::vector<std::string>& ap, std::size_t position) {
  if (word.empty()) throw InputError("semantic evaluation needs a nonempty word");
  if (position >= word.size()) throw InputError("evaluation position out of range");
  switch (f->op) {
    case FltlOp::True:
      return true;
    case FltlOp::False:
      return false;
    case FltlOp::Atom: {
      auto it = std::find(ap.begin(), ap.end(), f->atom);
      if (it == ap.end()) throw InputError("undeclared proposition '" + f->atom + "'");
      return (word[position] >> (it - ap.begin())) & 1u;
    }
    case FltlOp::Not:
      return !evaluate(f->lhs, word, ap, position);
    case FltlOp::And:
      return evaluate(f->lhs, word, ap, position) &&
             evaluate(f->rhs, word, ap, position);
    case FltlOp::Or:
      return evaluate(f->lhs, word, ap, position) ||
             evaluate(f->rhs, word, ap, position);
    case FltlOp::Implies:
      return !evaluate(f->lhs, word, ap, position) ||
             evaluate(f->rhs, word, ap, position);
    case FltlOp::Iff:
      return evaluate(f->lhs, word, ap, position) ==
             evaluate(f->rhs, word, ap, position);
    case FltlOp::Next:
      // X phi is false at the last position of a finite word.
      return position + 1 < word.size() &&
             evaluate(f->lhs, word, ap, position + 1);
    case FltlOp::Until:
      for (std::size_t j = position; j < word.size(); ++j) {
        if (evaluate(f->rhs, word, ap, j)) return true;
        if (!evaluate(f->lhs, word, ap, j)) return false;
      }
      return false;
    case FltlOp::Eventually:
      for (std::size_t j = position; j < word.size(); ++j)
        if (evaluate(f->lhs, word, ap, j)) return true;
      return false;
    case FltlOp::Always:
      for (std::size_t j = position; j < word.size(); ++j)
        if (!evaluate(f->lhs, word, ap, j)) return false;
      return true;
  }
  return false;
}

Letter make_letter(const std::vector<std::string>& props,
                   const std::vector<std::string>& ap) {
  Letter letter = 0;
  for (const auto& p : props) {
    auto it = std::find(ap.begin(), ap.end(), p);
    if (it == ap.end()) throw InputError("undeclared proposition '" + p + "'");
    letter |= Letter{1} << (it - ap.begin());
  }
  return letter;
}

}  // namespace lexssp
