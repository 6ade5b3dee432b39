// Trusted kernel core: primitive axiom schemas and rules. Everything in
// kernel_derived.cpp replays appendix derivations through these.

#include "dynth/kernel.hpp"

#include <algorithm>
#include <sstream>

#include "dynth/hetero.hpp"
#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"
#include "theorem_maker.hpp"

namespace dynth {
namespace kernel {

namespace {

Theorem mk(const Theory& th, std::vector<Formula> gamma, Formula concl) {
  return ThmMaker::make(th.id(), std::move(gamma), std::move(concl));
}

std::vector<Formula> unionGamma(const std::vector<Formula>& a,
                                const std::vector<Formula>& b) {
  std::vector<Formula> out = a;
  for (const Formula& f : b) {
    bool dup = false;
    for (const Formula& g : out)
      if (g.structurallyEqual(f)) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(f);
  }
  return out;
}

void requireTheory(const Theory& th, const Theorem& t, const char* who) {
  if (t.theoryId() != th.id())
    throw KernelError(std::string(who) + ": theorem belongs to a different theory");
}

std::string fml(const Theory& th, const Formula& f) {
  return printFormula(f, th);
}

[[noreturn]] void bail(const std::string& msg) { throw KernelError(msg); }

}  // namespace

// --- propositional tautology check -------------------------------------------

namespace {

struct LetterTable {
  std::vector<Formula> letters;
  int indexOf(const Formula& f) {
    for (std::size_t i = 0; i < letters.size(); ++i)
      if (letters[i].structurallyEqual(f)) return static_cast<int>(i);
    letters.push_back(f);
    return static_cast<int>(letters.size() - 1);
  }
};

void collectLetters(const Formula& f, LetterTable& t) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
    case Formula::Kind::Forall:
    case Formula::Kind::Box:
      t.indexOf(f);
      return;
    case Formula::Kind::Not:
      collectLetters(f.child(), t);
      return;
    case Formula::Kind::And:
      collectLetters(f.left(), t);
      collectLetters(f.right(), t);
      return;
  }
}

bool evalProp(const Formula& f, LetterTable& t, std::uint32_t assignment) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
    case Formula::Kind::Forall:
    case Formula::Kind::Box:
      return (assignment >> t.indexOf(f)) & 1;
    case Formula::Kind::Not:
      return !evalProp(f.child(), t, assignment);
    case Formula::Kind::And:
      return evalProp(f.left(), t, assignment) &&
             evalProp(f.right(), t, assignment);
  }
  return false;
}

}  // namespace

bool isPropTautology(const Formula& f, int maxLetters) {
  LetterTable t;
  collectLetters(f, t);
  if (static_cast<int>(t.letters.size()) > maxLetters)
    throw KernelError("tautology check: " + std::to_string(t.letters.size()) +
                      " opaque letters exceed the limit of " +
                      std::to_string(maxLetters));
  std::uint32_t combos = 1u << t.letters.size();
  for (std::uint32_t a = 0; a < combos; ++a)
    if (!evalProp(f, t, a)) return false;
  return true;
}

// --- elementary axioms ---------------------------------------------------------

Theorem axK(const Theory& th, const Program& p, const Formula& f,
            const Formula& g) {
  if (!th.ownsProgram(p)) bail("K: program not owned by " + th.describe());
  checkWellFormed(th, f);
  checkWellFormed(th, g);
  Formula concl = Formula::implies(
      Formula::box(p, Formula::implies(f, g)),
      Formula::implies(Formula::box(p, f), Formula::box(p, g)));
  return mk(th, {}, concl);
}

Theorem axV(const Theory& th, const Program& p, const Formula& f) {
  if (!th.ownsProgram(p)) bail("V: program not owned by " + th.describe());
  checkWellFormed(th, f);
  VarSetBase clash = fvSyn(th, f).intersect(th.progBv(p));
  if (!clash.empty())
    bail("V: side condition violated, variable " + clash.items()[0].name() +
         " is free in the formula and bound by the program");
  return mk(th, {}, Formula::implies(f, Formula::box(p, f)));
}

Theorem axB(const Theory& th, const Program& p, VarId v, const Formula& f) {
  if (!th.ownsProgram(p)) bail("B: program not owned by " + th.describe());
  if (!th.ownsVar(v)) bail("B: variable " + v.name() + " not owned by theory");
  checkWellFormed(th, f);
  VarSetBase vars = th.progFv(p);
  vars.unite(th.progBv(p));
  if (vars.contains(v))
    bail("B: side condition violated, variable " + v.name() +
         " occurs in the program");
  Formula lhs = Formula::forall(v, Formula::box(p, f));
  Formula rhs = Formula::box(p, Formula::forall(v, f));
  return mk(th, {}, Formula::iff(lhs, rhs));
}

Theorem ruleG(const Theory& th, const Theorem& premise, const Program& p) {
  requireTheory(th, premise, "G");
  if (!th.ownsProgram(p)) bail("G: program not owned by " + th.describe());
  return mk(th, premise.gamma(), Formula::box(p, premise.conclusion()));
}

// --- first-order layer ----------------------------------------------------------

Theorem assume(const Theory& th, const Formula& f) {
  checkWellFormed(th, f);
  if (!f.isModalityFree())
    bail("assume: formula contains a modality: " + fml(th, f));
  return mk(th, {f}, f);
}

Theorem taut(const Theory& th, const Formula& f) {
  checkWellFormed(th, f);
  if (!isPropTautology(f))
    bail("taut: not a propositional tautology: " + fml(th, f));
  return mk(th, {}, f);
}

Theorem mp(const Theory& th, const Theorem& implication,
           const Theorem& antecedent) {
  requireTheory(th, implication, "mp");
  requireTheory(th, antecedent, "mp");
  auto imp = implication.conclusion().asImplies();
  if (!imp) bail("mp: first theorem is not an implication");
  if (!imp->first.structurallyEqual(antecedent.conclusion()))
    bail("mp: antecedent mismatch: expected " + fml(th, imp->first) + ", got " +
         fml(th, antecedent.conclusion()));
  return mk(th, unionGamma(implication.gamma(), antecedent.gamma()),
            imp->second);
}

Theorem gen(const Theory& th, const Theorem& premise, VarId v) {
  requireTheory(th, premise, "gen");
  if (!th.ownsVar(v)) bail("gen: variable " + v.name() + " not owned by theory");
  return mk(th, premise.gamma(), Formula::forall(v, premise.conclusion()));
}

// --- variable-for-variable substitution -----------------------------------------

Formula substVar(const Theory& th, const Formula& f, VarId v, VarId w) {
  if (v == w) return f;
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const Atom& a = f.atomPayload();
      if (!th.atomFv(a).contains(v)) return f;
      if (!th.renamable())
        bail("substitution needs the renamable capability of " + th.describe());
      auto r = th.renameAtomVar(a, v, w);
      if (!r) bail("substitution: atom cannot be renamed");
      return Formula::atom(*r);
    }
    case Formula::Kind::Not:
      return Formula::mkNot(substVar(th, f.child(), v, w));
    case Formula::Kind::And:
      return Formula::mkAnd(substVar(th, f.left(), v, w),
                            substVar(th, f.right(), v, w));
    case Formula::Kind::Forall: {
      VarId u = f.boundVar();
      if (u == v) return f;  // v rebound below
      if (!fvSyn(th, f.child()).contains(v)) return f;
      if (u == w)
        bail("substitution of " + w.name() + " for " + v.name() +
             " is captured by the quantifier on " + u.name());
      return Formula::forall(u, substVar(th, f.child(), v, w));
    }
    case Formula::Kind::Box: {
      const Program& p = f.program();
      bool readsV = th.progFv(p).contains(v);
      bool belowV = fvSyn(th, f.child()).contains(v);
      if (!readsV && !belowV) return f;
      VarSetBase bv = th.progBv(p);
      if (bv.contains(v))
        bail("substitution for " + v.name() +
             " descends into a program that binds it");
      if (bv.contains(w))
        bail("substitution of " + w.name() + " for " + v.name() +
             " is captured by a program binding " + w.name());
      Program rp = p;
      if (readsV) {
        auto r = th.renameProgramVar(p, v, w);
        if (!r) bail("substitution: program cannot be renamed");
        rp = *r;
      }
      return Formula::box(rp, belowV ? substVar(th, f.child(), v, w)
                                     : f.child());
    }
  }
  bail("substVar: bad formula");
}

Theorem axForallElim(const Theory& th, VarId v, VarId w, const Formula& f) {
  checkWellFormed(th, f);
  if (!th.ownsVar(v) || !th.ownsVar(w))
    bail("forall-elim: variable not owned by theory");
  if (v != w && !th.renamable())
    bail("forall-elim: renaming " + v.name() + " to " + w.name() +
         " needs the renamable capability");
  Formula inst = substVar(th, f, v, w);
  return mk(th, {}, Formula::implies(Formula::forall(v, f), inst));
}

Theorem instThm(const Theory& th, const Theorem& premise, VarId v, VarId w) {
  requireTheory(th, premise, "inst");
  const Formula& c = premise.conclusion();
  if (c.kind() != Formula::Kind::Forall || c.boundVar() != v)
    bail("inst: conclusion is not a universal over " + v.name());
  Theorem elim = axForallElim(th, v, w, c.child());
  return mp(th, elim, premise);
}

Theorem axQDist(const Theory& th, VarId v, const Formula& f, const Formula& g) {
  checkWellFormed(th, f);
  checkWellFormed(th, g);
  if (!th.ownsVar(v)) bail("qdist: variable not owned by theory");
  Formula concl = Formula::implies(
      Formula::forall(v, Formula::implies(f, g)),
      Formula::implies(Formula::forall(v, f), Formula::forall(v, g)));
  return mk(th, {}, concl);
}

Theorem axVacuous(const Theory& th, VarId v, const Formula& f) {
  checkWellFormed(th, f);
  if (!th.ownsVar(v)) bail("vacuous: variable not owned by theory");
  if (fvSyn(th, f).contains(v))
    bail("vacuous: variable " + v.name() + " is free in " + fml(th, f));
  return mk(th, {}, Formula::implies(f, Formula::forall(v, f)));
}

Theorem axIdentityEq(const Theory& th, VarId v) {
  auto eq = th.eqPredicate(v, v);
  if (!eq)
    bail("identity-eq: theory " + th.describe() + " has no eq predicate");
  return mk(th, {}, *eq);
}

// --- lifting ---------------------------------------------------------------------

Theorem axHavoc(const Theory& th, VarId v, const Formula& f) {
  auto hp = th.havocProgram(v);
  if (!hp) bail("havoc axiom: theory " + th.describe() + " is not havoc-lifted");
  checkWellFormed(th, f);
  return mk(th, {},
            Formula::iff(Formula::box(*hp, f), Formula::forall(v, f)));
}

namespace {

Formula embedThroughLiftChain(const Formula& f, const Theory& from,
                              const Theory& to) {
  // walk to's base chain down to `from`, then embed outwards
  std::vector<const Theory*> chain;
  const Theory* cur = &to;
  while (cur && cur != &from) {
    chain.push_back(cur);
    cur = cur->base();
  }
  if (cur != &from) bail("reduce: target theory is not a lift of the premise theory");
  Formula out = f;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    out = embedFormula(out, **it);
  return out;
}

}  // namespace

Theorem ruleReduce(ReduceRule kind, const Theorem& premise, const Theory& target) {
  if (kind == ReduceRule::HR || kind == ReduceRule::RR) {
    const Theory* base = target.base();
    if (!base) bail("reduce: target is not a lifted theory");
    if (kind == ReduceRule::HR && target.kind() != Theory::Kind::HavocLift)
      bail("HR: target is not havoc-lifted");
    if (kind == ReduceRule::RR && !target.regularLifted())
      bail("RR: target is not regular-lifted");
    if (base->id() != premise.theoryId())
      bail("reduce: premise theory does not match the base of the target");
    std::vector<Formula> gamma;
    for (const Formula& g : premise.gamma())
      gamma.push_back(embedFormula(g, target));
    return ThmMaker::make(target.id(), std::move(gamma),
                          embedFormula(premise.conclusion(), target));
  }
  // HR0 / HR1
  int i = kind == ReduceRule::HR0 ? 0 : 1;
  const CombinedTheory* ct = combinedOf(target);
  if (!ct) bail("HR" + std::to_string(i) + ": target is not a heterogeneous theory");
  const Theory* w = ct->world(i);
  if (w->id() != premise.theoryId())
    bail("HR" + std::to_string(i) +
         ": premise theorem does not belong to world " + std::to_string(i) +
         " (" + w->describe() + ")");
  std::vector<Formula> gamma;
  for (const Formula& g : premise.gamma())
    gamma.push_back(embedWorldFormula(target, i, g));
  return ThmMaker::make(target.id(), std::move(gamma),
                        embedWorldFormula(target, i, premise.conclusion()));
}

// --- regular axioms ----------------------------------------------------------------

Theorem axTest(const Theory& th, const Formula& guard, const Formula& f) {
  checkWellFormed(th, f);
  Program t = regTest(th, guard);  // validates modality-freeness
  return mk(th, {},
            Formula::iff(Formula::box(t, f), Formula::implies(guard, f)));
}

Theorem axSeq(const Theory& th, const Program& p, const Program& q,
              const Formula& f) {
  checkWellFormed(th, f);
  Program pq = regSeq(th, p, q);
  return mk(th, {},
            Formula::iff(Formula::box(pq, f),
                         Formula::box(p, Formula::box(q, f))));
}

Theorem axChoice(const Theory& th, const Program& p, const Program& q,
                 const Formula& f) {
  checkWellFormed(th, f);
  Program pq = regChoice(th, p, q);
  return mk(th, {},
            Formula::iff(Formula::box(pq, f),
                         Formula::mkAnd(Formula::box(p, f),
                                        Formula::box(q, f))));
}

Theorem axStar(const Theory& th, const Program& p, const Formula& f) {
  checkWellFormed(th, f);
  Program st = regStar(th, p);
  return mk(th, {},
            Formula::iff(Formula::box(st, f),
                         Formula::mkAnd(f, Formula::box(p, Formula::box(st, f)))));
}

Theorem axI(const Theory& th, const Program& p, const Formula& f) {
  checkWellFormed(th, f);
  Program st = regStar(th, p);
  Formula step = Formula::implies(f, Formula::box(p, f));
  return mk(th, {},
            Formula::implies(Formula::box(st, step),
                             Formula::implies(f, Formula::box(st, f))));
}

Theorem axC(const Theory& th, const InductiveExpressivity& ind,
            const Program& p, const Formula& f, VarId v, VarId w) {
  checkWellFormed(th, f);
  if (!th.regularLifted()) bail("C: theory is not regular-lifted");
  if (v == w) bail("C: counter and helper variable must be distinct");
  if (!ind.isCountingVar(v))
    bail("C: " + v.name() + " is not a counting variable");
  if (!ind.isCountingVar(w))
    bail("C: " + w.name() + " is not a counting variable");
  if (fvSyn(th, f).contains(w))
    bail("C: helper variable " + w.name() + " is free in the formula");
  VarSetBase progVars = th.progFv(p);
  progVars.unite(th.progBv(p));
  if (progVars.contains(v))
    bail("C: counter variable " + v.name() + " occurs in the program");
  if (progVars.contains(w))
    bail("C: helper variable " + w.name() + " occurs in the program");

  Program st = regStar(th, p);
  Formula innermost = Formula::forall(
      v, Formula::implies(ind.natEq(v, w), f));
  Formula afterStep = Formula::forall(
      w, Formula::implies(ind.natPlus1(w, v), innermost));
  Formula body = Formula::forall(
      v, Formula::implies(Formula::mkAnd(ind.natGt0(v), f),
                          Formula::diamond(p, afterStep)));
  Formula premise = Formula::box(st, body);
  Formula concl = Formula::forall(
      v, Formula::implies(
             f, Formula::diamond(
                    st, Formula::exists(
                            v, Formula::mkAnd(Formula::mkNot(ind.natGt0(v)),
                                              f)))));
  return mk(th, {}, Formula::implies(premise, concl));
}

// --- shared helpers -------------------------------------------------------------

Theorem iffDir(const Theory& th, const Theorem& iffThm, int dir) {
  auto ab = iffThm.conclusion().asIff();
  if (!ab) bail("iffDir: theorem is not an equivalence");
  Formula want = dir == 0 ? Formula::implies(ab->first, ab->second)
                          : Formula::implies(ab->second, ab->first);
  Theorem t = taut(th, Formula::implies(iffThm.conclusion(), want));
  return mp(th, t, iffThm);
}

Theorem chainImp(const Theory& th, const Theorem& ab, const Theorem& bc) {
  auto i1 = ab.conclusion().asImplies();
  auto i2 = bc.conclusion().asImplies();
  if (!i1 || !i2) bail("chain: theorems must be implications");
  if (!i1->second.structurallyEqual(i2->first))
    bail("chain: conclusion of the first premise does not match the second");
  Formula schema = Formula::implies(
      ab.conclusion(),
      Formula::implies(bc.conclusion(),
                       Formula::implies(i1->first, i2->second)));
  return mp(th, mp(th, taut(th, schema), ab), bc);
}

Theorem boxCongruence(const Theory& th, const Program& p, const Theorem& iffThm) {
  auto ab = iffThm.conclusion().asIff();
  if (!ab) bail("boxCongruence: theorem is not an equivalence");
  Theorem fwd = ruleM(th, iffDir(th, iffThm, 0), p);
  Theorem bwd = ruleM(th, iffDir(th, iffThm, 1), p);
  Formula goal = Formula::iff(Formula::box(p, ab->first),
                              Formula::box(p, ab->second));
  Formula schema = Formula::implies(
      fwd.conclusion(), Formula::implies(bwd.conclusion(), goal));
  return mp(th, mp(th, taut(th, schema), fwd), bwd);
}

}  // namespace kernel
}  // namespace dynth
