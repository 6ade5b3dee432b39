#include "dynth/parser.hpp"

#include <cctype>
#include <sstream>

#include "dynth/hetero.hpp"
#include "dynth/instances.hpp"
#include "dynth/lifting.hpp"

namespace dynth {

// --- errors -------------------------------------------------------------------

ParseError::ParseError(std::string message, std::size_t position,
                       std::string input)
    : std::runtime_error(std::move(message)), position(position),
      input_(std::move(input)) {}

std::string ParseError::caretDiagram() const {
  std::size_t lineStart = input_.rfind('\n', position == 0 ? 0 : position - 1);
  lineStart = lineStart == std::string::npos ? 0 : lineStart + 1;
  std::size_t lineEnd = input_.find('\n', position);
  if (lineEnd == std::string::npos) lineEnd = input_.size();
  std::string line = input_.substr(lineStart, lineEnd - lineStart);
  std::string caret(position - lineStart, ' ');
  caret += '^';
  return line + "\n" + caret;
}

// --- lexer --------------------------------------------------------------------

Lexer::Lexer(std::string input) : in_(std::move(input)) {}

namespace {
bool identStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '@';
}
bool identCont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' ||
         c == '\'';
}
}  // namespace

Token Lexer::lex() {
  while (pos_ < in_.size() &&
         std::isspace(static_cast<unsigned char>(in_[pos_])))
    ++pos_;
  Token t;
  t.pos = pos_;
  if (pos_ >= in_.size()) {
    t.kind = Token::Kind::End;
    return t;
  }
  char c = in_[pos_];
  auto twoCharIs = [&](const char* s) {
    return pos_ + 1 < in_.size() && in_[pos_] == s[0] && in_[pos_ + 1] == s[1];
  };
  auto threeCharIs = [&](const char* s) {
    return pos_ + 2 < in_.size() && in_[pos_] == s[0] &&
           in_[pos_ + 1] == s[1] && in_[pos_ + 2] == s[2];
  };
  if (identStart(c)) {
    std::size_t start = pos_;
    ++pos_;
    for (;;) {
      while (pos_ < in_.size() && identCont(in_[pos_])) ++pos_;
      // a dot continues the identifier only when followed by another
      // identifier character (world prefixes like "c.x"); "forall v. F"
      // keeps its dot as punctuation
      if (pos_ + 1 < in_.size() && in_[pos_] == '.' && identCont(in_[pos_ + 1])) {
        pos_ += 2;
        continue;
      }
      break;
    }
    t.kind = Token::Kind::Ident;
    t.text = in_.substr(start, pos_ - start);
    return t;
  }
  bool negNumber = c == '-' && pos_ + 1 < in_.size() &&
                   std::isdigit(static_cast<unsigned char>(in_[pos_ + 1]));
  if (std::isdigit(static_cast<unsigned char>(c)) || negNumber) {
    std::size_t start = pos_;
    if (negNumber) ++pos_;
    while (pos_ < in_.size() &&
           std::isdigit(static_cast<unsigned char>(in_[pos_])))
      ++pos_;
    t.kind = Token::Kind::Int;
    t.text = in_.substr(start, pos_ - start);
    t.intValue = std::stoll(t.text);
    return t;
  }
  if (c == '"') {
    std::size_t start = ++pos_;
    while (pos_ < in_.size() && in_[pos_] != '"') ++pos_;
    if (pos_ >= in_.size())
      throw ParseError("unterminated string literal", t.pos, in_);
    t.kind = Token::Kind::Ident;  // strings are used only for prefixes
    t.text = in_.substr(start, pos_ - start);
    ++pos_;
    return t;
  }
  t.kind = Token::Kind::Punct;
  if (threeCharIs("<->")) {
    t.text = "<->";
    pos_ += 3;
    return t;
  }
  for (const char* two : {"->", ":=", "++", "<=", ">=", ".."}) {
    if (twoCharIs(two)) {
      t.text = two;
      pos_ += 2;
      return t;
    }
  }
  t.text = std::string(1, c);
  ++pos_;
  return t;
}

const Token& Lexer::peek() {
  if (!look_) look_ = lex();
  return *look_;
}

Token Lexer::next() {
  peek();
  Token t = *look_;
  look_.reset();
  return t;
}

bool Lexer::atEnd() { return peek().kind == Token::Kind::End; }

bool Lexer::accept(const std::string& s) {
  const Token& t = peek();
  if (t.kind == Token::Kind::Punct && t.text == s) {
    next();
    return true;
  }
  return false;
}

bool Lexer::acceptIdent(const std::string& s) {
  const Token& t = peek();
  if (t.kind == Token::Kind::Ident && t.text == s) {
    next();
    return true;
  }
  return false;
}

void Lexer::expect(const std::string& s) {
  if (!accept(s)) fail("expected '" + s + "'");
}

std::string Lexer::expectIdent(const char* what) {
  const Token& t = peek();
  if (t.kind != Token::Kind::Ident)
    fail(std::string("expected ") + what);
  return next().text;
}

Value Lexer::expectInt(const char* what) {
  const Token& t = peek();
  if (t.kind != Token::Kind::Int) fail(std::string("expected ") + what);
  return next().intValue;
}

bool Lexer::peekIs(const std::string& punct) {
  const Token& t = peek();
  return t.kind == Token::Kind::Punct && t.text == punct;
}

bool Lexer::peekIsIdent(const std::string& ident) {
  const Token& t = peek();
  return t.kind == Token::Kind::Ident && t.text == ident;
}

void Lexer::fail(const std::string& message) const {
  std::size_t p = look_ ? look_->pos : pos_;
  throw ParseError(message, p, in_);
}

void Lexer::failAt(const Token& t, const std::string& message) const {
  throw ParseError(message, t.pos, in_);
}

Lexer::Mark Lexer::mark() const { return {pos_, look_}; }

void Lexer::rewind(const Mark& m) {
  pos_ = m.pos;
  look_ = m.lookahead;
}

// --- program parsing -------------------------------------------------------------

namespace {

Program parseProgramChoice(Lexer& lx, const Theory& th);

Program parseProgramPrimary(Lexer& lx, const Theory& th) {
  if (th.regularLifted()) {
    if (lx.accept("?")) {
      lx.expect("(");
      Formula f = parseFormula(lx, th);
      lx.expect(")");
      return regTest(th, f);
    }
    if (lx.accept("(")) {
      Program p = parseProgramChoice(lx, th);
      lx.expect(")");
      return p;
    }
    if (lx.peekIsIdent("if")) {
      // if F then p else q  ==  ?(F); p ++ ?(!F); q
      lx.next();
      Formula f = parseFormula(lx, th);
      if (!lx.acceptIdent("then")) lx.fail("expected 'then'");
      Program p = parseProgramChoice(lx, th);
      if (!lx.acceptIdent("else")) lx.fail("expected 'else'");
      Program q = parseProgramChoice(lx, th);
      return regChoice(th, regSeq(th, regTest(th, f), p),
                       regSeq(th, regTest(th, Formula::mkNot(f)), q));
    }
  }
  return th.parseProgram(lx);
}

Program parseProgramStar(Lexer& lx, const Theory& th) {
  Program p = parseProgramPrimary(lx, th);
  while (th.regularLifted() && lx.accept("*")) p = regStar(th, p);
  return p;
}

Program parseProgramSeq(Lexer& lx, const Theory& th) {
  Program p = parseProgramStar(lx, th);
  if (th.regularLifted() && lx.accept(";"))
    return regSeq(th, p, parseProgramSeq(lx, th));
  return p;
}

Program parseProgramChoice(Lexer& lx, const Theory& th) {
  Program p = parseProgramSeq(lx, th);
  while (th.regularLifted() && lx.accept("++"))
    p = regChoice(th, p, parseProgramSeq(lx, th));
  return p;
}

}  // namespace

Program parseProgram(Lexer& lx, const Theory& th) {
  return parseProgramChoice(lx, th);
}

Program parseProgram(const std::string& text, const Theory& th) {
  Lexer lx(text);
  Program p = parseProgram(lx, th);
  if (!lx.atEnd()) lx.fail("unexpected trailing input after program");
  return p;
}

// --- formula parsing ---------------------------------------------------------------

namespace {

Formula parseIff(Lexer& lx, const Theory& th);

Formula parseFormulaPrimary(Lexer& lx, const Theory& th) {
  if (lx.peekIsIdent("true") || lx.peekIsIdent("false")) {
    Token t = lx.next();
    auto v = th.verum();
    if (!v)
      lx.failAt(t, "theory " + th.describe() + " has no canonical true atom");
    return t.text == "true" ? *v : Formula::mkNot(*v);
  }
  if (lx.peekIs("(")) {
    // Could open a parenthesized formula or a parenthesized term of an
    // atom; try the theory's atom grammar first and fall back.
    auto m = lx.mark();
    try {
      return th.parseAtomicFormula(lx);
    } catch (const ParseError&) {
      lx.rewind(m);
    }
    lx.expect("(");
    Formula f = parseIff(lx, th);
    lx.expect(")");
    return f;
  }
  return th.parseAtomicFormula(lx);
}

Formula parseUnary(Lexer& lx, const Theory& th) {
  if (lx.accept("!")) return Formula::mkNot(parseUnary(lx, th));
  if (lx.accept("[")) {
    Program p = parseProgramChoice(lx, th);
    lx.expect("]");
    return Formula::box(p, parseUnary(lx, th));
  }
  if (lx.peekIs("<")) {
    // speculative: '<' may open a diamond or start nothing valid; the
    // theory atom grammars never begin with '<'
    lx.next();
    Program p = parseProgramChoice(lx, th);
    lx.expect(">");
    return Formula::diamond(p, parseUnary(lx, th));
  }
  if (lx.peekIsIdent("forall") || lx.peekIsIdent("exists")) {
    bool universal = lx.next().text == "forall";
    std::string name = lx.transformed(lx.expectIdent("variable"));
    VarId v = th.internVar(name);
    lx.expect(".");
    Formula body = parseUnary(lx, th);
    return universal ? Formula::forall(v, body) : Formula::exists(v, body);
  }
  return parseFormulaPrimary(lx, th);
}

Formula parseAnd(Lexer& lx, const Theory& th) {
  Formula f = parseUnary(lx, th);
  while (lx.accept("&")) f = Formula::mkAnd(f, parseUnary(lx, th));
  return f;
}

Formula parseOr(Lexer& lx, const Theory& th) {
  Formula f = parseAnd(lx, th);
  while (lx.accept("|")) f = Formula::mkOr(f, parseAnd(lx, th));
  return f;
}

Formula parseImp(Lexer& lx, const Theory& th) {
  Formula f = parseOr(lx, th);
  if (lx.accept("->")) return Formula::implies(f, parseImp(lx, th));
  return f;
}

Formula parseIff(Lexer& lx, const Theory& th) {
  Formula f = parseImp(lx, th);
  while (lx.accept("<->")) f = Formula::iff(f, parseImp(lx, th));
  return f;
}

}  // namespace

Formula parseFormula(Lexer& lx, const Theory& th) { return parseIff(lx, th); }

Formula parseFormula(const std::string& text, const Theory& th) {
  Lexer lx(text);
  Formula f = parseFormula(lx, th);
  if (!lx.atEnd()) lx.fail("unexpected trailing input after formula");
  checkWellFormed(th, f);
  return f;
}

// --- printing -----------------------------------------------------------------------

namespace {

// precedence: iff 0, -> 1, | 2, & 3, unary 4
void printRec(std::ostream& os, const Formula& f, const Theory& th,
              const Theory::IdentMapper& m, int minPrec) {
  if (auto iff = f.asIff()) {
    bool paren = minPrec > 0;
    if (paren) os << '(';
    printRec(os, iff->first, th, m, 1);
    os << " <-> ";
    printRec(os, iff->second, th, m, 1);
    if (paren) os << ')';
    return;
  }
  if (auto orF = f.asOr()) {
    bool paren = minPrec > 2;
    if (paren) os << '(';
    printRec(os, orF->first, th, m, 2);
    os << " | ";
    printRec(os, orF->second, th, m, 3);
    if (paren) os << ')';
    return;
  }
  if (auto imp = f.asImplies()) {
    bool paren = minPrec > 1;
    if (paren) os << '(';
    printRec(os, imp->first, th, m, 2);
    os << " -> ";
    printRec(os, imp->second, th, m, 1);  // right associative
    if (paren) os << ')';
    return;
  }
  if (auto dia = f.asDiamond()) {
    os << '<';
    th.printProgramMapped(os, dia->first, m);
    os << "> ";
    printRec(os, dia->second, th, m, 4);
    return;
  }
  if (auto ex = f.asExists()) {
    os << "exists " << (m ? m(ex->first.name()) : ex->first.name()) << ". ";
    printRec(os, ex->second, th, m, 4);
    return;
  }
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      std::ostringstream tmp;
      th.printAtomMapped(tmp, f.atomPayload(), m);
      std::string text = tmp.str();
      bool paren = minPrec >= 4 && text.find(' ') != std::string::npos;
      if (paren) os << '(';
      os << text;
      if (paren) os << ')';
      return;
    }
    case Formula::Kind::Not:
      os << '!';
      printRec(os, f.child(), th, m, 4);
      return;
    case Formula::Kind::And: {
      bool paren = minPrec > 3;
      if (paren) os << '(';
      printRec(os, f.left(), th, m, 3);
      os << " & ";
      printRec(os, f.right(), th, m, 4);
      if (paren) os << ')';
      return;
    }
    case Formula::Kind::Forall:
      os << "forall " << (m ? m(f.boundVar().name()) : f.boundVar().name())
         << ". ";
      printRec(os, f.child(), th, m, 4);
      return;
    case Formula::Kind::Box:
      os << '[';
      th.printProgramMapped(os, f.program(), m);
      os << "] ";
      printRec(os, f.child(), th, m, 4);
      return;
  }
}

}  // namespace

std::string printFormula(const Formula& f, const Theory& th,
                         const Theory::IdentMapper& m) {
  std::ostringstream os;
  printRec(os, f, th, m, 0);
  return os.str();
}

std::string printProgram(const Program& p, const Theory& th,
                         const Theory::IdentMapper& m) {
  std::ostringstream os;
  th.printProgramMapped(os, p, m);
  return os.str();
}

// --- theory declarations ---------------------------------------------------------

namespace {

Window parseWindowRange(Lexer& lx) {
  Value lo = lx.expectInt("window lower bound");
  lx.expect("..");
  Value hi = lx.expectInt("window upper bound");
  return {lo, hi};
}

TheoryPtr parseKripkeDecl(Lexer& lx) {
  KripkeModel model;
  auto stateIndex = [&model, &lx](const std::string& name) {
    for (std::size_t i = 0; i < model.states.size(); ++i)
      if (model.states[i] == name) return static_cast<int>(i);
    lx.fail("undeclared kripke state '" + name + "'");
  };
  if (!lx.acceptIdent("states")) lx.fail("kripke declaration starts with 'states'");
  lx.expect("{");
  while (!lx.accept("}")) model.states.push_back(lx.expectIdent("state name"));
  for (;;) {
    if (lx.acceptIdent("prog")) {
      std::string name = lx.expectIdent("program name");
      std::vector<std::pair<int, int>> rel;
      lx.expect("{");
      while (!lx.accept("}")) {
        int from = stateIndex(lx.expectIdent("state"));
        lx.expect("->");
        int to = stateIndex(lx.expectIdent("state"));
        rel.emplace_back(from, to);
      }
      model.programs.emplace_back(std::move(name), std::move(rel));
    } else if (lx.acceptIdent("atom")) {
      std::string name = lx.expectIdent("atom name");
      std::vector<int> set;
      lx.expect("{");
      while (!lx.accept("}")) set.push_back(stateIndex(lx.expectIdent("state")));
      model.atoms.emplace_back(std::move(name), std::move(set));
    } else {
      break;
    }
  }
  return kripkeTheory(std::move(model));
}

}  // namespace

TheoryPtr parseTheoryDecl(Lexer& lx) {
  std::string head = lx.expectIdent("theory constructor");
  if (head == "semiring") {
    lx.expect("(");
    std::string carrier = lx.expectIdent("carrier (int or nat)");
    Window w{-100, 100};
    if (lx.accept(",")) w = parseWindowRange(lx);
    lx.expect(")");
    if (carrier == "int") return semiringTheory(Carrier::Int, w);
    if (carrier == "nat") {
      if (w.lo < 0) w.lo = 0;
      return semiringTheory(Carrier::Nat, w);
    }
    lx.fail("unknown carrier '" + carrier + "' (expected int or nat)");
  }
  if (head == "kripke") {
    lx.expect("(");
    TheoryPtr th = parseKripkeDecl(lx);
    lx.expect(")");
    return th;
  }
  if (head == "havoc") {
    lx.expect("(");
    TheoryPtr base = parseTheoryDecl(lx);
    lx.expect(")");
    return liftHavoc(std::move(base));
  }
  if (head == "regular") {
    lx.expect("(");
    TheoryPtr base = parseTheoryDecl(lx);
    lx.expect(")");
    return liftRegular(std::move(base));
  }
  if (head == "combine") {
    lx.expect("(");
    if (!lx.acceptIdent("world0")) lx.fail("expected 'world0:'");
    lx.expect(":");
    TheoryPtr w0 = parseTheoryDecl(lx);
    std::string p0 = "c.";
    if (lx.acceptIdent("prefix")) p0 = lx.expectIdent("prefix string");
    lx.expect(",");
    if (!lx.acceptIdent("world1")) lx.fail("expected 'world1:'");
    lx.expect(":");
    TheoryPtr w1 = parseTheoryDecl(lx);
    std::string p1 = "p.";
    if (lx.acceptIdent("prefix")) p1 = lx.expectIdent("prefix string");
    lx.expect(",");
    if (!lx.acceptIdent("couplings")) lx.fail("expected 'couplings:'");
    lx.expect(":");
    lx.expect("[");
    std::vector<HeteroAtom> couplings;
    auto worldVar = [&](const std::string& name) {
      if (name.rfind(p0, 0) == 0) return VarId::intern(name, 0);
      if (name.rfind(p1, 0) == 0) return VarId::intern(name, 1);
      lx.fail("coupling variable '" + name + "' carries neither world prefix");
    };
    while (!lx.accept("]")) {
      std::string kind = lx.expectIdent("coupling kind");
      lx.expect("(");
      VarId a = worldVar(lx.expectIdent("variable"));
      lx.expect(",");
      VarId b = worldVar(lx.expectIdent("variable"));
      if (kind == "eq") {
        lx.expect(")");
        couplings.push_back(couplingEq(a, b));
      } else if (kind == "scaled_eq") {
        lx.expect(",");
        Value k = lx.expectInt("scale factor");
        lx.expect(")");
        couplings.push_back(couplingScaledEq(a, b, k));
      } else {
        lx.fail("unknown coupling '" + kind + "' (expected eq or scaled_eq)");
      }
      lx.accept(",");
    }
    lx.expect(")");
    // the script-level combination is the fully heterogeneous theory
    return fullHetero(std::move(w0), std::move(w1), std::move(couplings), p0,
                      p1);
  }
  lx.fail("unknown theory constructor '" + head + "'");
}

TheoryPtr parseTheoryDecl(const std::string& text) {
  Lexer lx(text);
  TheoryPtr th = parseTheoryDecl(lx);
  if (!lx.atEnd()) lx.fail("unexpected trailing input after theory declaration");
  return th;
}

}  // namespace dynth
