#include "dynth/instances.hpp"

#include <algorithm>
#include <sstream>

#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"

namespace dynth {

// --- terms -------------------------------------------------------------------

TermPtr termLit(Value v) {
  auto t = std::make_shared<SemiringTerm>();
  t->tag = SemiringTerm::Tag::Lit;
  t->lit = v;
  return t;
}

TermPtr termVar(VarId v) {
  auto t = std::make_shared<SemiringTerm>();
  t->tag = SemiringTerm::Tag::Var;
  t->var = v;
  return t;
}

TermPtr termAdd(TermPtr a, TermPtr b) {
  auto t = std::make_shared<SemiringTerm>();
  t->tag = SemiringTerm::Tag::Add;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

TermPtr termMul(TermPtr a, TermPtr b) {
  auto t = std::make_shared<SemiringTerm>();
  t->tag = SemiringTerm::Tag::Mul;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

bool termEqual(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case SemiringTerm::Tag::Lit:
      return a->lit == b->lit;
    case SemiringTerm::Tag::Var:
      return a->var == b->var;
    default:
      return termEqual(a->a, b->a) && termEqual(a->b, b->b);
  }
}

Value termEval(const SemiringTerm& t, const State& s) {
  switch (t.tag) {
    case SemiringTerm::Tag::Lit:
      return t.lit;
    case SemiringTerm::Tag::Var:
      return s.get(t.var);
    case SemiringTerm::Tag::Add:
      return termEval(*t.a, s) + termEval(*t.b, s);
    case SemiringTerm::Tag::Mul:
      return termEval(*t.a, s) * termEval(*t.b, s);
  }
  return 0;
}

VarSetBase termFv(const SemiringTerm& t) {
  switch (t.tag) {
    case SemiringTerm::Tag::Lit:
      return {};
    case SemiringTerm::Tag::Var:
      return {t.var};
    default: {
      VarSetBase s = termFv(*t.a);
      s.unite(termFv(*t.b));
      return s;
    }
  }
}

TermPtr termRename(const TermPtr& t, VarId from, VarId to) {
  switch (t->tag) {
    case SemiringTerm::Tag::Lit:
      return t;
    case SemiringTerm::Tag::Var:
      return t->var == from ? termVar(to) : t;
    case SemiringTerm::Tag::Add:
      return termAdd(termRename(t->a, from, to), termRename(t->b, from, to));
    case SemiringTerm::Tag::Mul:
      return termMul(termRename(t->a, from, to), termRename(t->b, from, to));
  }
  return t;
}

TermPtr termSubst(const TermPtr& t, VarId v, const TermPtr& replacement) {
  switch (t->tag) {
    case SemiringTerm::Tag::Lit:
      return t;
    case SemiringTerm::Tag::Var:
      return t->var == v ? replacement : t;
    case SemiringTerm::Tag::Add:
      return termAdd(termSubst(t->a, v, replacement),
                     termSubst(t->b, v, replacement));
    case SemiringTerm::Tag::Mul:
      return termMul(termSubst(t->a, v, replacement),
                     termSubst(t->b, v, replacement));
  }
  return t;
}

namespace {

void printTerm(std::ostream& os, const SemiringTerm& t, int minPrec,
               const Theory::IdentMapper& m) {
  // + binds looser than *
  switch (t.tag) {
    case SemiringTerm::Tag::Lit:
      if (t.lit < 0 && minPrec > 0)
        os << '(' << t.lit << ')';
      else
        os << t.lit;
      return;
    case SemiringTerm::Tag::Var:
      os << (m ? m(t.var.name()) : t.var.name());
      return;
    case SemiringTerm::Tag::Add: {
      bool paren = minPrec > 1;
      if (paren) os << '(';
      printTerm(os, *t.a, 1, m);
      os << " + ";
      printTerm(os, *t.b, 2, m);  // + associates left
      if (paren) os << ')';
      return;
    }
    case SemiringTerm::Tag::Mul: {
      bool paren = minPrec > 2;
      if (paren) os << '(';
      printTerm(os, *t.a, 2, m);
      os << " * ";
      printTerm(os, *t.b, 3, m);  // * associates left
      if (paren) os << ')';
      return;
    }
  }
}

}  // namespace

std::string termStr(const TermPtr& t) {
  std::ostringstream os;
  printTerm(os, *t, 0, {});
  return os.str();
}

// --- semiring theory -----------------------------------------------------------

namespace {

void checkNatTerm(Carrier carrier, const SemiringTerm& t) {
  if (carrier != Carrier::Nat) return;
  switch (t.tag) {
    case SemiringTerm::Tag::Lit:
      if (t.lit < 0)
        throw TheoryError("negative literal " + std::to_string(t.lit) +
                          " is not a nat semiring term");
      return;
    case SemiringTerm::Tag::Var:
      return;
    default:
      checkNatTerm(carrier, *t.a);
      checkNatTerm(carrier, *t.b);
  }
}

class SemiringTheory final : public Theory {
 public:
  SemiringTheory(Carrier carrier, Window window)
      : carrier_(carrier), window_(window) {
    if (carrier_ == Carrier::Nat) window_.lo = std::max<Value>(window_.lo, 0);
    if (window_.lo > window_.hi || window_.lo > 0 || window_.hi < 1)
      throw TheoryError("semiring window must be nonempty and contain 0 and 1");
    for (const char* n : {"v", "w", "x", "y", "z", "i"})
      pool_.push_back(VarId::intern(n));
  }

  std::string describe() const override {
    return carrier_ == Carrier::Int ? "semiring(int)" : "semiring(nat)";
  }

  bool ownsAtom(const Atom& a) const override {
    return a.as<SemiringAtom>() != nullptr && a.signature() == id();
  }
  bool ownsProgram(const Program& p) const override {
    return p.as<SemiringProg>() != nullptr && p.signature() == id();
  }
  bool ownsVar(VarId v) const override { return v.world() == -1; }
  std::vector<VarId> varPool() const override { return pool_; }

  bool finiteEnumerable() const override { return false; }
  std::vector<Value> valueWindow(VarId, const EvalBudget& b) const override {
    Window w = b.window;
    if (carrier_ == Carrier::Nat) w.lo = std::max<Value>(w.lo, 0);
    std::vector<Value> out;
    for (Value val = w.lo; val <= w.hi; ++val) out.push_back(val);
    return out;
  }
  bool windowExhaustive(VarId, const EvalBudget&) const override {
    return false;
  }

  bool atomEval(const State& s, const Atom& a) const override {
    const auto& at = payload(a);
    return termEval(*at.lhs, s) <= termEval(*at.rhs, s);
  }
  VarSetBase atomFv(const Atom& a) const override {
    const auto& at = payload(a);
    VarSetBase fv = termFv(*at.lhs);
    fv.unite(termFv(*at.rhs));
    return fv;
  }

  SuccessorSet progSucc(const State& s, const Program& p,
                        const EvalBudget&) const override {
    const auto& asg = payload(p);
    SuccessorSet out;
    out.states.push_back(s.with(asg.target, termEval(*asg.rhs, s)));
    return out;
  }
  VarSetBase progFv(const Program& p) const override {
    return termFv(*payload(p).rhs);
  }
  VarSetBase progBv(const Program& p) const override {
    return {payload(p).target};
  }

  bool renamable() const override { return true; }
  std::optional<Atom> renameAtomVar(const Atom& a, VarId from,
                                    VarId to) const override {
    const auto& at = payload(a);
    return Atom::make(id(), SemiringAtom{termRename(at.lhs, from, to),
                                         termRename(at.rhs, from, to)});
  }
  std::optional<Program> renameProgramVar(const Program& p, VarId from,
                                          VarId to) const override {
    const auto& asg = payload(p);
    return Program::make(
        id(), SemiringProg{asg.target == from ? to : asg.target,
                           termRename(asg.rhs, from, to)});
  }
  std::optional<Formula> eqPredicate(VarId v, VarId w) const override {
    return Formula::mkAnd(Formula::atom(leq(termVar(v), termVar(w))),
                          Formula::atom(leq(termVar(w), termVar(v))));
  }
  std::shared_ptr<const InductiveExpressivity> inductive() const override;
  std::optional<Formula> verum() const override {
    return Formula::atom(leq(termLit(0), termLit(0)));
  }

  Atom sampleAtom(Rng& rng) const override {
    return leq(sampleTerm(rng, 2), sampleTerm(rng, 2));
  }
  Program sampleProgram(Rng& rng, int) const override {
    return Program::make(id(),
                         SemiringProg{rng.pick(pool_), sampleTerm(rng, 2)});
  }

  void printAtomMapped(std::ostream& os, const Atom& a,
                       const IdentMapper& m) const override {
    const auto& at = payload(a);
    printTerm(os, *at.lhs, 0, m);
    os << " <= ";
    printTerm(os, *at.rhs, 0, m);
  }
  void printProgramMapped(std::ostream& os, const Program& p,
                          const IdentMapper& m) const override {
    const auto& asg = payload(p);
    os << (m ? m(asg.target.name()) : asg.target.name()) << " := ";
    printTerm(os, *asg.rhs, 0, m);
  }

  Formula parseAtomicFormula(Lexer& lx) const override;
  Program parseProgram(Lexer& lx) const override;

  Atom leq(TermPtr a, TermPtr b) const {
    checkNatTerm(carrier_, *a);
    checkNatTerm(carrier_, *b);
    return Atom::make(id(), SemiringAtom{std::move(a), std::move(b)});
  }
  Program assign(VarId v, TermPtr t) const {
    checkNatTerm(carrier_, *t);
    return Program::make(id(), SemiringProg{v, std::move(t)});
  }
  Carrier carrier() const { return carrier_; }

 private:
  const SemiringAtom& payload(const Atom& a) const {
    const auto* at = a.as<SemiringAtom>();
    if (!at || a.signature() != id())
      throw TheoryError("atom does not belong to " + describe());
    return *at;
  }
  const SemiringProg& payload(const Program& p) const {
    const auto* sp = p.as<SemiringProg>();
    if (!sp || p.signature() != id())
      throw TheoryError("program does not belong to " + describe());
    return *sp;
  }

  TermPtr sampleTerm(Rng& rng, int depth) const {
    if (depth <= 0 || rng.chance(0.55)) {
      if (rng.chance(0.45))
        return termLit(rng.range(carrier_ == Carrier::Nat ? 0 : -3, 3));
      return termVar(rng.pick(pool_));
    }
    TermPtr a = sampleTerm(rng, depth - 1);
    TermPtr b = sampleTerm(rng, depth - 1);
    // keep multiplication mostly linear so windows stay meaningful
    if (rng.chance(0.25))
      return termMul(termLit(rng.range(carrier_ == Carrier::Nat ? 0 : -2, 2)),
                     std::move(b));
    return termAdd(std::move(a), std::move(b));
  }

  Carrier carrier_;
  Window window_;
  std::vector<VarId> pool_;
};

TermPtr parseTerm(Lexer& lx, const SemiringTheory& th, int minPrec);

TermPtr parseTermPrimary(Lexer& lx, const SemiringTheory& th) {
  if (lx.accept("(")) {
    TermPtr t = parseTerm(lx, th, 0);
    lx.expect(")");
    return t;
  }
  const Token& t = lx.peek();
  if (t.kind == Token::Kind::Int) {
    Value v = lx.next().intValue;
    if (th.carrier() == Carrier::Nat && v < 0)
      lx.fail("negative literal is not allowed on the nat carrier");
    return termLit(v);
  }
  if (t.kind == Token::Kind::Ident) {
    std::string name = lx.transformed(lx.next().text);
    return termVar(VarId::intern(name));
  }
  lx.fail("expected a term");
}

TermPtr parseTerm(Lexer& lx, const SemiringTheory& th, int minPrec) {
  TermPtr lhs = parseTermPrimary(lx, th);
  for (;;) {
    if (minPrec <= 1 && lx.peekIs("+")) {
      lx.next();
      lhs = termAdd(lhs, parseTerm(lx, th, 2));
    } else if (minPrec <= 2 && lx.peekIs("*")) {
      // `*` is also the Kleene star; only treat it as multiplication when a
      // term can start afterwards.
      auto m = lx.mark();
      lx.next();
      const Token& nxt = lx.peek();
      bool startsTerm = nxt.kind == Token::Kind::Int ||
                        nxt.kind == Token::Kind::Ident || nxt.text == "(";
      if (!startsTerm) {
        lx.rewind(m);
        break;
      }
      lhs = termMul(lhs, parseTerm(lx, th, 3));
    } else {
      break;
    }
  }
  return lhs;
}

Formula SemiringTheory::parseAtomicFormula(Lexer& lx) const {
  TermPtr lhs = parseTerm(lx, *this, 0);
  if (lx.accept("<=")) {
    return Formula::atom(leq(lhs, parseTerm(lx, *this, 0)));
  }
  if (lx.accept("=")) {  // t1 = t2  ==  t1 <= t2 & t2 <= t1
    TermPtr rhs = parseTerm(lx, *this, 0);
    return Formula::mkAnd(Formula::atom(leq(lhs, rhs)),
                          Formula::atom(leq(rhs, lhs)));
  }
  if (lx.accept("<"))  // t1 < t2  ==  t1 + 1 <= t2 (discrete carrier)
    return Formula::atom(leq(termAdd(lhs, termLit(1)), parseTerm(lx, *this, 0)));
  if (lx.accept(">="))
    return Formula::atom(leq(parseTerm(lx, *this, 0), lhs));
  if (lx.accept(">"))
    return Formula::atom(
        leq(termAdd(parseTerm(lx, *this, 0), termLit(1)), lhs));
  lx.fail("expected a comparison (<=, =, <, >=, >)");
}

Program SemiringTheory::parseProgram(Lexer& lx) const {
  std::string name = lx.transformed(lx.expectIdent("assignment target"));
  lx.expect(":=");
  TermPtr rhs = parseTerm(lx, *this, 0);
  return assign(VarId::intern(name), rhs);
}

std::shared_ptr<const InductiveExpressivity> SemiringTheory::inductive() const {
  auto self = std::static_pointer_cast<const SemiringTheory>(shared_from_this());
  auto ind = std::make_shared<InductiveExpressivity>();
  ind->countingPool = pool_;
  ind->isCountingVar = [self](VarId v) { return self->ownsVar(v); };
  const bool nat = carrier_ == Carrier::Nat;
  auto leqF = [self](TermPtr a, TermPtr b) {
    return Formula::atom(self->leq(std::move(a), std::move(b)));
  };
  ind->u2n = [nat](Value v) {
    return static_cast<std::uint64_t>(nat ? v : std::max<Value>(v, 0));
  };
  ind->natGt0 = [leqF](VarId v) { return leqF(termLit(1), termVar(v)); };
  if (nat) {
    ind->natEq = [self](VarId v, VarId w) { return *self->eqPredicate(v, w); };
    ind->natPlus1 = [leqF](VarId v, VarId w) {
      TermPtr vp1 = termAdd(termVar(v), termLit(1));
      return Formula::mkAnd(leqF(vp1, termVar(w)), leqF(termVar(w), vp1));
    };
  } else {
    // int carrier counts via u2n(z) = max(z, 0)
    ind->natEq = [self, leqF](VarId v, VarId w) {
      Formula bothNonpos = Formula::mkAnd(leqF(termVar(v), termLit(0)),
                                          leqF(termVar(w), termLit(0)));
      Formula posEq = Formula::mkAnd(leqF(termLit(0), termVar(v)),
                                     *self->eqPredicate(v, w));
      return Formula::mkOr(bothNonpos, posEq);
    };
    ind->natPlus1 = [self, leqF](VarId v, VarId w) {
      TermPtr one = termLit(1);
      Formula nonposCase = Formula::mkAnd(
          leqF(termVar(v), termLit(0)),
          Formula::mkAnd(leqF(termVar(w), one), leqF(one, termVar(w))));
      TermPtr vp1 = termAdd(termVar(v), termLit(1));
      Formula posCase = Formula::mkAnd(
          leqF(termLit(0), termVar(v)),
          Formula::mkAnd(leqF(termVar(w), vp1), leqF(vp1, termVar(w))));
      return Formula::mkOr(nonposCase, posCase);
    };
  }
  return ind;
}

}  // namespace

TheoryPtr semiringTheory(Carrier carrier, Window window) {
  return std::make_shared<SemiringTheory>(carrier, window);
}

namespace {
const SemiringTheory& asSemiring(const Theory& th) {
  const auto* st = dynamic_cast<const SemiringTheory*>(&th);
  if (!st) throw TheoryError(th.describe() + " is not a semiring theory");
  return *st;
}
}  // namespace

Carrier semiringCarrier(const Theory& th) { return asSemiring(th).carrier(); }

Atom semiringLeq(const Theory& th, TermPtr lhs, TermPtr rhs) {
  return asSemiring(th).leq(std::move(lhs), std::move(rhs));
}

Program semiringAssign(const Theory& th, VarId v, TermPtr t) {
  return asSemiring(th).assign(v, std::move(t));
}

const Theory* underlyingSemiring(const Theory& th) {
  const Theory* cur = &th;
  while (cur->base()) cur = cur->base();
  return dynamic_cast<const SemiringTheory*>(cur);
}

std::shared_ptr<const InductiveExpressivity> semiringInductiveInstance(
    const Theory& th) {
  auto ind = th.inductive();
  if (!ind)
    throw TheoryError(th.describe() + " has no inductive-expressivity witness");
  return ind;
}

// --- Kripke ------------------------------------------------------------------

namespace {

struct KripkeAtomP {
  int index;
  bool operator==(const KripkeAtomP& o) const { return index == o.index; }
};
struct KripkeProgP {
  int index;
  bool operator==(const KripkeProgP& o) const { return index == o.index; }
};

class KripkeTheory final : public Theory {
 public:
  explicit KripkeTheory(KripkeModel model)
      : model_(std::move(model)), world_(VarId::intern("@w")) {
    if (model_.states.empty())
      throw TheoryError("kripke model needs at least one state");
    int n = static_cast<int>(model_.states.size());
    for (auto& [name, rel] : model_.programs)
      for (auto& [from, to] : rel)
        if (from < 0 || from >= n || to < 0 || to >= n)
          throw TheoryError("kripke program " + name +
                            " references an undeclared state");
    for (auto& [name, set] : model_.atoms)
      for (int s : set)
        if (s < 0 || s >= n)
          throw TheoryError("kripke atom " + name +
                            " references an undeclared state");
  }

  std::string describe() const override { return "kripke"; }

  bool ownsAtom(const Atom& a) const override {
    return a.as<KripkeAtomP>() != nullptr && a.signature() == id();
  }
  bool ownsProgram(const Program& p) const override {
    return p.as<KripkeProgP>() != nullptr && p.signature() == id();
  }
  bool ownsVar(VarId v) const override { return v == world_; }
  std::vector<VarId> varPool() const override { return {world_}; }

  bool finiteEnumerable() const override { return true; }
  std::vector<Value> valueWindow(VarId, const EvalBudget&) const override {
    std::vector<Value> out;
    for (std::size_t i = 0; i < model_.states.size(); ++i)
      out.push_back(static_cast<Value>(i));
    return out;
  }
  bool windowExhaustive(VarId, const EvalBudget&) const override {
    return true;
  }

  bool atomEval(const State& s, const Atom& a) const override {
    const auto& set = model_.atoms[payload(a).index].second;
    Value w = s.get(world_);
    return std::find(set.begin(), set.end(), w) != set.end();
  }
  VarSetBase atomFv(const Atom&) const override { return {world_}; }

  SuccessorSet progSucc(const State& s, const Program& p,
                        const EvalBudget&) const override {
    SuccessorSet out;
    Value w = s.get(world_);
    for (auto& [from, to] : model_.programs[payload(p).index].second)
      if (from == w) out.states.push_back(s.with(world_, to));
    std::sort(out.states.begin(), out.states.end());
    out.states.erase(std::unique(out.states.begin(), out.states.end()),
                     out.states.end());
    return out;
  }
  VarSetBase progFv(const Program&) const override { return {world_}; }
  VarSetBase progBv(const Program&) const override { return {world_}; }

  std::optional<Formula> verum() const override {
    if (model_.atoms.empty()) return std::nullopt;
    Formula q = Formula::atom(Atom::make(id(), KripkeAtomP{0}));
    return Formula::mkOr(q, Formula::mkNot(q));
  }

  Atom sampleAtom(Rng& rng) const override {
    if (model_.atoms.empty())
      throw TheoryError("kripke model declares no atoms");
    return Atom::make(
        id(), KripkeAtomP{static_cast<int>(rng.next() % model_.atoms.size())});
  }
  Program sampleProgram(Rng& rng, int) const override {
    if (model_.programs.empty())
      throw TheoryError("kripke model declares no programs");
    return Program::make(
        id(),
        KripkeProgP{static_cast<int>(rng.next() % model_.programs.size())});
  }

  void printAtomMapped(std::ostream& os, const Atom& a,
                       const IdentMapper& m) const override {
    const std::string& n = model_.atoms[payload(a).index].first;
    os << (m ? m(n) : n);
  }
  void printProgramMapped(std::ostream& os, const Program& p,
                          const IdentMapper& m) const override {
    const std::string& n = model_.programs[payload(p).index].first;
    os << (m ? m(n) : n);
  }
  void printValue(std::ostream& os, VarId, Value val) const override {
    if (val >= 0 && val < static_cast<Value>(model_.states.size()))
      os << model_.states[val];
    else
      os << val;
  }

  Formula parseAtomicFormula(Lexer& lx) const override {
    Token t = lx.peek();
    std::string name = lx.transformed(lx.expectIdent("atom name"));
    for (std::size_t i = 0; i < model_.atoms.size(); ++i)
      if (model_.atoms[i].first == name)
        return Formula::atom(
            Atom::make(id(), KripkeAtomP{static_cast<int>(i)}));
    lx.failAt(t, "unknown atom '" + name + "' (searched the kripke signature: " +
                     atomNames() + ")");
  }
  Program parseProgram(Lexer& lx) const override {
    Token t = lx.peek();
    std::string name = lx.transformed(lx.expectIdent("program name"));
    for (std::size_t i = 0; i < model_.programs.size(); ++i)
      if (model_.programs[i].first == name)
        return Program::make(id(), KripkeProgP{static_cast<int>(i)});
    lx.failAt(t, "unknown program '" + name +
                     "' (searched the kripke signature: " + progNames() + ")");
  }

  Atom atomByName(const std::string& name) const {
    for (std::size_t i = 0; i < model_.atoms.size(); ++i)
      if (model_.atoms[i].first == name)
        return Atom::make(id(), KripkeAtomP{static_cast<int>(i)});
    throw TheoryError("unknown kripke atom " + name);
  }
  Program progByName(const std::string& name) const {
    for (std::size_t i = 0; i < model_.programs.size(); ++i)
      if (model_.programs[i].first == name)
        return Program::make(id(), KripkeProgP{static_cast<int>(i)});
    throw TheoryError("unknown kripke program " + name);
  }
  VarId worldVar() const { return world_; }

 private:
  std::string atomNames() const {
    std::string s;
    for (auto& [n, _] : model_.atoms) s += (s.empty() ? "" : ", ") + n;
    return s.empty() ? "<none>" : s;
  }
  std::string progNames() const {
    std::string s;
    for (auto& [n, _] : model_.programs) s += (s.empty() ? "" : ", ") + n;
    return s.empty() ? "<none>" : s;
  }
  const KripkeAtomP& payload(const Atom& a) const {
    const auto* at = a.as<KripkeAtomP>();
    if (!at || a.signature() != id())
      throw TheoryError("atom does not belong to kripke theory");
    return *at;
  }
  const KripkeProgP& payload(const Program& p) const {
    const auto* pp = p.as<KripkeProgP>();
    if (!pp || p.signature() != id())
      throw TheoryError("program does not belong to kripke theory");
    return *pp;
  }

  KripkeModel model_;
  VarId world_;
};

}  // namespace

TheoryPtr kripkeTheory(KripkeModel model) {
  return std::make_shared<KripkeTheory>(std::move(model));
}

namespace {
const KripkeTheory& asKripke(const Theory& th) {
  const auto* kt = dynamic_cast<const KripkeTheory*>(&th);
  if (!kt) throw TheoryError(th.describe() + " is not a kripke theory");
  return *kt;
}
}  // namespace

Atom kripkeAtom(const Theory& th, const std::string& name) {
  return asKripke(th).atomByName(name);
}
Program kripkeProgram(const Theory& th, const std::string& name) {
  return asKripke(th).progByName(name);
}
VarId kripkeWorldVar(const Theory& th) { return asKripke(th).worldVar(); }

// --- term substitution through formulas ---------------------------------------

namespace {

Program substProgramTerm(const Theory& th, const Program& p, VarId v,
                         const TermPtr& t);

// Rewrites the read positions of `p`, which must not bind `v`.
Program substProgramTerm(const Theory& th, const Program& p, VarId v,
                         const TermPtr& t) {
  if (const auto* rp = asRegularProg(th, p)) {
    const Theory& baseTh = *th.base();
    auto wrap = [&](RegularProg r) {
      return Program::make<RegularProg>(th.id(), std::move(r));
    };
    switch (rp->tag) {
      case RegularProg::Tag::Base:
        return *th.embedProgramFromBase(
            substProgramTerm(baseTh, rp->basePgm, v, t));
      case RegularProg::Tag::Test:
        return wrap(RegularProg{RegularProg::Tag::Test, Program(), nullptr,
                                nullptr,
                                substituteTerm(th, rp->testFml, v, t)});
      case RegularProg::Tag::Star: {
        Program body = Program::make<RegularProg>(th.id(), *rp->p);
        auto sub = substProgramTerm(th, body, v, t);
        return wrap(RegularProg{RegularProg::Tag::Star, Program(),
                                std::make_shared<RegularProg>(
                                    *sub.as<RegularProg>()),
                                nullptr, Formula()});
      }
      case RegularProg::Tag::Seq:
      case RegularProg::Tag::Choice: {
        Program a = Program::make<RegularProg>(th.id(), *rp->p);
        Program b = Program::make<RegularProg>(th.id(), *rp->q);
        auto sa = substProgramTerm(th, a, v, t);
        auto sb = substProgramTerm(th, b, v, t);
        return wrap(RegularProg{
            rp->tag, Program(),
            std::make_shared<RegularProg>(*sa.as<RegularProg>()),
            std::make_shared<RegularProg>(*sb.as<RegularProg>()), Formula()});
      }
    }
  }
  if (const auto* hp = asHavocProg(th, p)) {
    if (hp->isHavoc) return p;  // no read positions
    const Theory& baseTh = *th.base();
    return *th.embedProgramFromBase(substProgramTerm(baseTh, hp->basePgm, v, t));
  }
  if (const auto* sp = p.as<SemiringProg>()) {
    if (sp->target == v)
      throw TheoryError("substitution target " + v.name() +
                        " is bound by an assignment");
    return Program::make<SemiringProg>(p.signature(),
                                       SemiringProg{sp->target,
                                                    termSubst(sp->rhs, v, t)});
  }
  throw TheoryError("term substitution is only defined over semiring programs");
}

}  // namespace

Formula substituteTerm(const Theory& th, const Formula& f, VarId v,
                       const TermPtr& t) {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const Atom& a = f.atomPayload();
      if (!th.atomFv(a).contains(v)) return f;
      const auto* sa = a.as<SemiringAtom>();
      if (!sa)
        throw TheoryError("term substitution is only defined over semiring atoms");
      return Formula::atom(Atom::make<SemiringAtom>(
          a.signature(),
          SemiringAtom{termSubst(sa->lhs, v, t), termSubst(sa->rhs, v, t)}));
    }
    case Formula::Kind::Not:
      return Formula::mkNot(substituteTerm(th, f.child(), v, t));
    case Formula::Kind::And:
      return Formula::mkAnd(substituteTerm(th, f.left(), v, t),
                            substituteTerm(th, f.right(), v, t));
    case Formula::Kind::Forall: {
      VarId u = f.boundVar();
      if (u == v) return f;  // v rebound below
      bool below = fvSyn(th, f.child()).contains(v);
      if (!below) return f;
      if (termFv(*t).contains(u))
        throw TheoryError("substituting " + termStr(t) + " for " + v.name() +
                          " would capture " + u.name());
      return Formula::forall(u, substituteTerm(th, f.child(), v, t));
    }
    case Formula::Kind::Box: {
      const Program& p = f.program();
      bool inProg = th.progFv(p).contains(v);
      bool below = fvSyn(th, f.child()).contains(v);
      if (!inProg && !below) return f;
      VarSetBase bv = th.progBv(p);
      if (bv.contains(v))
        throw TheoryError("cannot substitute for " + v.name() +
                          ": it is bound by the program");
      VarSetBase captured = bv.intersect(termFv(*t));
      if (!captured.empty())
        throw TheoryError("substituting " + termStr(t) + " for " + v.name() +
                          " would capture " + captured.items()[0].name());
      Program sp = inProg ? substProgramTerm(th, p, v, t) : p;
      return Formula::box(sp, below ? substituteTerm(th, f.child(), v, t)
                                    : f.child());
    }
  }
  throw TheoryError("substituteTerm: bad formula");
}

}  // namespace dynth
