// Surface syntax: lexer, formula/program parsers and printers. The
// connective layer is fixed; atom and base-program sub-grammars are
// supplied by the theory at hand.
//
// Formula grammar (loosest to tightest):
//   F <-> G | F -> G (right assoc) | F | G | F & G | !F, [p]F, <p>F,
//   forall v. F, exists v. F, true, false, ( F ), theory atoms
// Program grammar: p ++ q | p ; q | p* | ?(F) | v := * | ( p ) | base,
// plus `if F then p else q` which expands to ?(F);p ++ ?(!F);q.

#ifndef DYNTH_PARSER_HPP_
#define DYNTH_PARSER_HPP_

#include <functional>
#include <optional>
#include <string>

#include "dynth/theory.hpp"

namespace dynth {

struct ParseError : std::runtime_error {
  ParseError(std::string message, std::size_t position, std::string input);
  std::size_t position;
  std::string caretDiagram() const;  // offending line with a caret

 private:
  std::string input_;
};

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  Value intValue = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string input);

  const Token& peek();
  Token next();
  bool atEnd();

  // True and consumes when the upcoming token is the punctuation `s`.
  bool accept(const std::string& s);
  bool acceptIdent(const std::string& s);
  void expect(const std::string& s);
  std::string expectIdent(const char* what);
  Value expectInt(const char* what);
  bool peekIs(const std::string& punct);
  bool peekIsIdent(const std::string& ident);

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void failAt(const Token& t, const std::string& message) const;

  // Applied to every identifier before theories see it; world routing in
  // combined theories strips name prefixes here. Throws ParseError to
  // reject identifiers outside the active world.
  using IdentTransform = std::function<std::string(const std::string&)>;
  IdentTransform identTransform;
  std::string transformed(const std::string& ident) const {
    return identTransform ? identTransform(ident) : ident;
  }

  // Snapshot/rollback for speculative parses.
  struct Mark {
    std::size_t pos;
    std::optional<Token> lookahead;
  };
  Mark mark() const;
  void rewind(const Mark& m);

  const std::string& input() const { return in_; }

 private:
  Token lex();
  std::string in_;
  std::size_t pos_ = 0;
  std::optional<Token> look_;
};

Formula parseFormula(const std::string& text, const Theory& th);
Program parseProgram(const std::string& text, const Theory& th);
Formula parseFormula(Lexer& lx, const Theory& th);
Program parseProgram(Lexer& lx, const Theory& th);

std::string printFormula(const Formula& f, const Theory& th,
                         const Theory::IdentMapper& m = {});
std::string printProgram(const Program& p, const Theory& th,
                         const Theory::IdentMapper& m = {});

// Theory declaration expressions: semiring(int|nat[, lo..hi]),
// kripke(states {...} prog a {s0->s1 ...} atom q {...}),
// havoc(<decl>), regular(<decl>),
// combine(world0: <decl> prefix "c.", world1: <decl> prefix "p.",
//         couplings: [eq(c.x, p.x), scaled_eq(c.p, p.gap, 100)])
TheoryPtr parseTheoryDecl(const std::string& text);
TheoryPtr parseTheoryDecl(Lexer& lx);

}  // namespace dynth

#endif  // DYNTH_PARSER_HPP_
