#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynth/hetero.hpp"
#include "dynth/instance_calculus.hpp"
#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"
#include "dynth/script.hpp"

using namespace dynth;
using namespace dynth::kernel;

namespace {

TheoryPtr semLifted() {
  return liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
}

TheoryPtr twoStateLifted() {
  KripkeModel m;
  m.states = {"s0", "s1"};
  m.programs = {{"a", {{0, 1}}}};
  m.atoms = {{"q", {1}}};
  return liftRegular(liftHavoc(kripkeTheory(m)));
}

bool screenedOn(const Theory& th, const Theorem& t, Value lo = -30,
                Value hi = 30) {
  return !falsify(th, t.conclusion(), EvalBudget::withWindow(lo, hi))
              .has_value();
}

}  // namespace

TEST_CASE("V axiom: side condition checked on the declared sets") {
  TheoryPtr th = semLifted();
  Program p = parseProgram("w := v + 1", *th);

  Theorem ok = axV(*th, p, parseFormula("0 <= v", *th));
  CHECK(screenedOn(*th, ok, -100, 100));

  // the frame formula reads the written variable
  CHECK_THROWS_WITH_AS(axV(*th, p, parseFormula("0 <= w", *th)),
                       doctest::Contains("w"), KernelError);
}

TEST_CASE("K and B instances are exhaustively valid on Kripke frames") {
  TheoryPtr th = twoStateLifted();
  Program a = parseProgram("a", *th);
  Formula q = parseFormula("q", *th);
  Theorem k = axK(*th, a, q, Formula::mkNot(q));
  CHECK(isValidExhaustive(*th, k.conclusion()));

  VarId w = kripkeWorldVar(*th->base()->base());
  CHECK_THROWS_AS(axB(*th, a, w, q), KernelError);  // @w occurs in the program
}

TEST_CASE("G wraps conclusions in boxes") {
  TheoryPtr th = twoStateLifted();
  Formula q = parseFormula("q", *th);
  Theorem tautThm = taut(*th, Formula::mkOr(q, Formula::mkNot(q)));
  Theorem boxed = ruleG(*th, tautThm, parseProgram("a", *th));
  CHECK(isValidExhaustive(*th, boxed.conclusion()));
  CHECK(printFormula(boxed.conclusion(), *th) == "[a] (q | !q)");
}

TEST_CASE("havoc axiom holds in both directions") {
  TheoryPtr th = semLifted();
  Theorem t = axHavoc(*th, VarId::intern("v"), parseFormula("0 <= v", *th));
  CHECK(screenedOn(*th, t));
  TheoryPtr kt = twoStateLifted();
  Theorem t2 = axHavoc(*kt, kripkeWorldVar(*kt->base()->base()),
                       parseFormula("q", *kt));
  CHECK(isValidExhaustive(*kt, t2.conclusion()));
}

TEST_CASE("regular axioms") {
  TheoryPtr th = twoStateLifted();
  Formula q = parseFormula("q", *th);
  Program a = parseProgram("a", *th);

  CHECK(isValidExhaustive(*th, axStar(*th, a, q).conclusion()));
  CHECK(isValidExhaustive(*th, axI(*th, a, q).conclusion()));
  CHECK(isValidExhaustive(*th, axChoice(*th, a, a, q).conclusion()));
  CHECK(isValidExhaustive(*th, axSeq(*th, a, a, q).conclusion()));
  CHECK(isValidExhaustive(*th, axTest(*th, *th->verum(), q).conclusion()));
  // [?(true)] q is equivalent to q itself
  CHECK(isValidExhaustive(
      *th, Formula::iff(Formula::box(regTest(*th, *th->verum()), q), q)));
}

TEST_CASE("convergence axiom side conditions") {
  TheoryPtr th = semLifted();
  auto ind = th->inductive();
  REQUIRE(ind);
  Program p = parseProgram("i := i + (-1)", *th);
  VarId v = VarId::intern("v"), w = VarId::intern("w"), i = VarId::intern("i");
  Formula f = parseFormula("0 <= i", *th);

  Theorem ok = axC(*th, *ind, p, f, v, w);
  CHECK(screenedOn(*th, ok, -4, 4));

  CHECK_THROWS_AS(axC(*th, *ind, p, parseFormula("0 <= w", *th), v, w),
                  KernelError);
  CHECK_THROWS_AS(axC(*th, *ind, p, f, i, w), KernelError);
  CHECK_THROWS_AS(axC(*th, *ind, p, f, v, v), KernelError);
}

TEST_CASE("propositional layer") {
  TheoryPtr th = twoStateLifted();
  Formula q = parseFormula("q", *th);
  Formula boxQ = parseFormula("[a] q", *th);

  Formula contra = Formula::implies(
      Formula::implies(boxQ, q),
      Formula::implies(Formula::mkNot(q), Formula::mkNot(boxQ)));
  CHECK(taut(*th, contra).gamma().empty());

  CHECK_THROWS_AS(taut(*th, q), KernelError);  // not a tautology

  // letter-count overflow
  TheoryPtr sem = semLifted();
  Formula big = parseFormula("0 <= v", *sem);
  for (int k = 0; k < 24; ++k) {
    Formula lit = Formula::atom(semiringLeq(*underlyingSemiring(*sem),
                                            termLit(k),
                                            termVar(VarId::intern("v"))));
    big = Formula::mkOr(big, lit);
  }
  CHECK_THROWS_AS(taut(*sem, big), KernelError);

  Theorem asm2 = assume(*sem, parseFormula("0 <= v -> 1 <= v + 1", *sem));
  CHECK(asm2.gamma().size() == 1);
  CHECK_THROWS_AS(assume(*sem, parseFormula("[w := 1] 0 <= w", *sem)),
                  KernelError);

  Theorem a1 = assume(*sem, parseFormula("0 <= v", *sem));
  Theorem imp = assume(*sem, parseFormula("0 <= v -> 0 <= v + 1", *sem));
  Theorem out = mp(*sem, imp, a1);
  CHECK(out.gamma().size() == 2);
  CHECK(printFormula(out.conclusion(), *sem) == "0 <= v + 1");
}

TEST_CASE("forall elimination with capture checks") {
  TheoryPtr th = semLifted();
  VarId v = VarId::intern("v"), w = VarId::intern("w");

  Theorem t = axForallElim(*th, v, w, parseFormula("0 <= v", *th));
  CHECK(printFormula(t.conclusion(), *th) == "forall v. (0 <= v) -> 0 <= w");
  CHECK(screenedOn(*th, t));

  Formula inner = Formula::forall(w, parseFormula("v <= w", *th));
  CHECK_THROWS_AS(axForallElim(*th, v, w, inner), KernelError);

  Formula boxed = parseFormula("[w := 0] v <= w", *th);
  CHECK_THROWS_AS(axForallElim(*th, v, w, boxed), KernelError);

  Theorem all = gen(*th, taut(*th, parseFormula("0 <= v | !(0 <= v)", *th)), v);
  Theorem inst = instThm(*th, all, v, w);
  CHECK(printFormula(inst.conclusion(), *th) == "0 <= w | !(0 <= w)");
}

TEST_CASE("derived rules replay to the expected schemas") {
  TheoryPtr th = twoStateLifted();
  Program a = parseProgram("a", *th);
  Formula q = parseFormula("q", *th);
  Formula nq = Formula::mkNot(q);

  CHECK(isValidExhaustive(*th, axBoxAnd(*th, a, q, nq).conclusion()));
  CHECK(isValidExhaustive(*th, axKDia(*th, a, q, nq).conclusion()));

  VarId w = kripkeWorldVar(*th->base()->base());
  CHECK(isValidExhaustive(
      *th, axMPDia(*th, a, q, Formula::mkOr(q, nq), {w}).conclusion()));

  // premise f -> [a]f from a tautology via G (V is never applicable on
  // Kripke theories: every atom reads the world variable)
  Formula t = Formula::mkOr(q, nq);
  Theorem boxed = ruleG(*th, taut(*th, t), a);
  Formula premF = Formula::implies(t, Formula::box(a, t));
  Theorem prem = mp(
      *th, taut(*th, Formula::implies(boxed.conclusion(), premF)), boxed);
  Theorem looped = ruleInd(*th, prem);
  CHECK(isValidExhaustive(*th, looped.conclusion()));

  Theorem mThm =
      ruleM(*th, taut(*th, Formula::implies(Formula::mkAnd(q, nq), q)), a);
  CHECK(isValidExhaustive(*th, mThm.conclusion()));
  Theorem mr = ruleMR(*th, prem,
                      taut(*th, Formula::implies(t, Formula::mkOr(nq, q))));
  CHECK(isValidExhaustive(*th, mr.conclusion()));
}

TEST_CASE("frame rule checks the world partition") {
  TheoryPtr th = fullHetero(
      semiringTheory(Carrier::Int), semiringTheory(Carrier::Int),
      {couplingEq(VarId::intern("c.x", 0), VarId::intern("p.x", 1))});
  Program plantStep = parseProgram("p.x := p.x + p.v", *th);
  Formula frame = parseFormula("0 <= c.acc", *th);
  Formula psi = parseFormula("0 <= p.x", *th);
  Formula xi = parseFormula("0 <= p.v", *th);

  Theorem ok = axFi(*th, 0, plantStep, psi, xi, frame);
  CHECK(screenedOn(*th, ok, -6, 6));

  CHECK_THROWS_AS(axFi(*th, 1, plantStep, psi, xi, psi), KernelError);
  CHECK_THROWS_AS(
      axFi(*th, 0, plantStep, psi, xi, parseFormula("eq(c.x, p.x)", *th)),
      KernelError);
}

TEST_CASE("ghost axiom") {
  TheoryPtr th = semLifted();
  VarId v = VarId::intern("v"), w = VarId::intern("w");
  Theorem t = axGhost(*th, v, w, parseFormula("0 <= w", *th));
  CHECK(screenedOn(*th, t));
  CHECK_THROWS_AS(axGhost(*th, v, w, parseFormula("0 <= v", *th)), KernelError);
}

TEST_CASE("pullback axiom composes") {
  TheoryPtr th = semLifted();
  Program p = parseProgram("w := v + 1", *th);
  Formula phi = parseFormula("1 <= w", *th);
  Formula psi = parseFormula("0 <= v", *th);
  Formula xi = parseFormula("0 <= w", *th);
  VarSetBase vecSet = th->progBv(p);
  vecSet.unite(fvSyn(*th, Formula::diamond(p, phi)));
  std::vector<VarId> vecPlus =
      fvSyn(*th, Formula::mkAnd(psi, xi)).minus(vecSet).items();
  Theorem t = axPB(*th, p, phi, psi, xi, vecSet.items(), vecPlus);
  CHECK(screenedOn(*th, t, -8, 8));
}

TEST_CASE("reduction rules embed theorems of the base") {
  TheoryPtr base = semiringTheory(Carrier::Int);
  TheoryPtr havocTh = liftHavoc(base);
  TheoryPtr regTh = liftRegular(havocTh);

  Theorem eq1 = assume(*base, parseFormula("0 <= v -> 1 <= v + 1", *base));
  Theorem lifted = ruleReduce(ReduceRule::HR, eq1, *havocTh);
  CHECK(lifted.theoryId() == havocTh->id());
  CHECK(lifted.gamma().size() == 1);
  Theorem lifted2 = ruleReduce(ReduceRule::RR, lifted, *regTh);
  CHECK(lifted2.theoryId() == regTh->id());

  CHECK_THROWS_AS(ruleReduce(ReduceRule::RR, eq1, *regTh), KernelError);

  TheoryPtr hetero = fullHetero(
      base, semiringTheory(Carrier::Int),
      {couplingEq(VarId::intern("c.x", 0), VarId::intern("p.x", 1))});
  Theorem w0 = ruleReduce(ReduceRule::HR0, eq1, *hetero);
  CHECK(printFormula(w0.conclusion(), *hetero) == "0 <= c.v -> 1 <= c.v + 1");
  const Theory* w1 = combinedOf(*hetero)->world(1);
  Theorem other = assume(*w1, parseFormula("0 <= v", *w1));
  CHECK_THROWS_AS(ruleReduce(ReduceRule::HR0, other, *hetero), KernelError);
}

TEST_CASE("gamma discipline: only assume introduces assumptions") {
  TheoryPtr th = semLifted();
  Formula a = parseFormula("0 <= v", *th);
  Formula b = parseFormula("0 <= w", *th);
  Theorem ta = assume(*th, a);
  Theorem tb = assume(*th, b);
  Theorem glue =
      taut(*th, Formula::implies(a, Formula::implies(b, Formula::mkAnd(a, b))));
  CHECK(glue.gamma().empty());
  Theorem joined = mp(*th, mp(*th, glue, ta), tb);
  CHECK(joined.gamma().size() == 2);
  Theorem boxed = ruleG(*th, joined, parseProgram("x := 1", *th));
  CHECK(boxed.gamma().size() == 2);  // G preserves, never grows

  Theorem glue2 = taut(*th, Formula::implies(a, Formula::implies(a, a)));
  Theorem joined2 = mp(*th, mp(*th, glue2, ta), ta);
  CHECK(joined2.gamma().size() == 1);
}

TEST_CASE("theorems do not cross theory boundaries") {
  TheoryPtr a = semiringTheory(Carrier::Int);
  TheoryPtr b = semiringTheory(Carrier::Int);
  Theorem t = assume(*a, parseFormula("0 <= v", *a));
  CHECK_THROWS_AS(gen(*b, t, VarId::intern("v")), KernelError);
}

TEST_CASE("derived rules equal their primitive replays") {
  TheoryPtr th = twoStateLifted();
  Program a = parseProgram("a", *th);
  Formula q = parseFormula("q", *th);
  Formula t = Formula::mkOr(q, Formula::mkNot(q));

  // ind replayed by hand: G with the starred program, then I, then mp
  Theorem boxed = ruleG(*th, taut(*th, t), a);
  Formula premF = Formula::implies(t, Formula::box(a, t));
  Theorem prem =
      mp(*th, taut(*th, Formula::implies(boxed.conclusion(), premF)), boxed);
  Theorem viaDerived = ruleInd(*th, prem);
  Theorem viaPrimitives =
      mp(*th, axI(*th, a, t), ruleG(*th, prem, regStar(*th, a)));
  CHECK(viaDerived.conclusion().structurallyEqual(viaPrimitives.conclusion()));

  // M replayed by hand: G then K then mp
  Theorem impThm = taut(*th, Formula::implies(Formula::mkAnd(q, t), q));
  Theorem viaM = ruleM(*th, impThm, a);
  Theorem byHand = mp(*th, axK(*th, a, Formula::mkAnd(q, t), q),
                      ruleG(*th, impThm, a));
  CHECK(viaM.conclusion().structurallyEqual(byHand.conclusion()));
}

TEST_CASE("every script step command is documented") {
  // the dispatcher and the manual share one table
  for (const char* op : {"assume", "taut", "mp", "G", "axK", "axV", "axB",
                         "havoc", "test", "seq", "choice", "star", "I", "C",
                         "HR0", "HR1", "ind", "Fi", "ghost", "assign", "qed",
                         "tautfrom", "iffdir", "boxcong", "chain", "inst"}) {
    bool found = false;
    for (const StepDoc& d : scriptStepTable())
      found = found || std::string(d.name) == op;
    CHECK_MESSAGE(found, op);
  }
}
