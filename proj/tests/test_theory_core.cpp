#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynth/instances.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"
#include "dynth/theory.hpp"

using namespace dynth;

namespace {

TheoryPtr twoStateKripke() {
  // s0 -a-> s1, q holds at s1
  KripkeModel m;
  m.states = {"s0", "s1"};
  m.programs = {{"a", {{0, 1}}}};
  m.atoms = {{"q", {1}}};
  return kripkeTheory(m);
}

}  // namespace

TEST_CASE("atom evaluation on the semiring") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  VarId v = VarId::intern("v");
  State s = th->initialState().with(v, 3);
  Formula f = parseFormula("0 <= v", *th);
  CHECK(evalFormula(*th, s, f, EvalBudget{}) == Verdict::True);
  CHECK(evalFormula(*th, th->initialState().with(v, -1), f, EvalBudget{}) ==
        Verdict::False);
}

TEST_CASE("box over a Kripke transition") {
  TheoryPtr th = twoStateKripke();
  Formula f = Formula::box(kripkeProgram(*th, "a"),
                           Formula::atom(kripkeAtom(*th, "q")));
  // brute force over all a-successors of s0
  State s0 = th->initialState();
  CHECK(evalFormula(*th, s0, f, EvalBudget{}) == Verdict::True);
  // from s1 there is no a-transition: box is vacuously true
  State s1 = s0.with(kripkeWorldVar(*th), 1);
  CHECK(evalFormula(*th, s1, f, EvalBudget{}) == Verdict::True);
}

TEST_CASE("the introductory assignment formula holds at every sampled state") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  Formula f = parseFormula("0 <= v -> [w := v + 1] 1 <= w", *th);
  EvalBudget b;
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    State s = th->sampleState(rng, b);
    CHECK(evalFormula(*th, s, f, b) == Verdict::True);
  }
}

TEST_CASE("equal_on") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  VarId v = VarId::intern("v"), w = VarId::intern("w");
  State a = th->initialState().with(v, 1).with(w, 2);
  State b = th->initialState().with(v, 1).with(w, 3);

  CHECK(equalOn(*th, a, a, VarSet::finite({v, w})));
  CHECK(equalOn(*th, a, a, VarSet::complementOf({})));
  CHECK(equalOn(*th, a, b, VarSet::finite({v})));
  CHECK_FALSE(equalOn(*th, a, b, VarSet::finite({w})));

  // defaults agree outside the support
  State c = th->initialState().with(v, 1);
  State d = th->initialState().with(v, 2);
  CHECK(equalOn(*th, c, d, VarSet::complementOf({v})));
  CHECK_FALSE(equalOn(*th, c, d, VarSet::complementOf({w})));
}

TEST_CASE("syntactic free variables") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  VarId v = VarId::intern("v"), w = VarId::intern("w");

  Formula boxed = parseFormula("[w := v + 1] 1 <= w", *th);
  CHECK(fvSyn(*th, boxed) == VarSetBase({v, w}));

  Formula all = Formula::forall(v, parseFormula("0 <= v", *th));
  CHECK(fvSyn(*th, all).empty());

  Formula conj = parseFormula("0 <= v & 0 <= w", *th);
  CHECK(fvSyn(*th, conj) == VarSetBase({v, w}));
}

TEST_CASE("theory law audit passes on the instances") {
  LawReport sem = checkTheoryLaws(*semiringTheory(Carrier::Int), 1000, 7);
  CHECK_MESSAGE(sem.ok(), sem.str());

  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    TheoryPtr k = kripkeTheory(randomKripkeModel(rng, 4));
    LawReport rep = checkTheoryLaws(*k, 60, 9 + i);
    CHECK_MESSAGE(rep.ok(), rep.str());
  }
}

TEST_CASE("corrupted bv declaration fails the bounded-effect law") {
  TheoryPtr bad = corruptProgBv(semiringTheory(Carrier::Int));
  LawReport rep = checkTheoryLaws(*bad, 300, 5);
  CHECK_FALSE(rep.ok());
  bool foundBoundedEffect = false;
  for (const auto& f : rep.failures)
    if (f.law == "bounded effect" && !f.detail.empty()) foundBoundedEffect = true;
  CHECK(foundBoundedEffect);
}

TEST_CASE("corrupted atom fv fails the coincidence law") {
  TheoryPtr bad = corruptAtomFv(semiringTheory(Carrier::Int));
  LawReport rep = checkTheoryLaws(*bad, 300, 5);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("exhaustive validity on finite theories") {
  // q holds everywhere
  KripkeModel m;
  m.states = {"s0", "s1"};
  m.programs = {{"a", {{0, 1}, {1, 0}}}};
  m.atoms = {{"q", {0, 1}}};
  TheoryPtr th = kripkeTheory(m);
  Formula boxQ = parseFormula("[a] q", *th);
  CHECK(isValidExhaustive(*th, boxQ));

  // single state, no transitions: <a> q is unsatisfiable
  KripkeModel dead;
  dead.states = {"s0"};
  dead.programs = {{"a", {}}};
  dead.atoms = {{"q", {0}}};
  TheoryPtr deadTh = kripkeTheory(dead);
  CHECK_FALSE(isValidExhaustive(*deadTh, parseFormula("<a> q", *deadTh)));

  // tautology over the two-state model
  TheoryPtr two = twoStateKripke();
  CHECK(isValidExhaustive(*two, parseFormula("[a] q | !([a] q)", *two)));
}

TEST_CASE("formula coincidence over fvSyn on sampled states") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  EvalBudget b = EvalBudget::withWindow(-5, 5);
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Formula f = randomFormula(*th, rng, 3);
    VarSetBase fv = fvSyn(*th, f);
    State mu = th->sampleState(rng, b);
    State nu = th->sampleState(rng, b);
    for (VarId v : fv) nu.set(v, mu.get(v));
    CHECK(evalFormula(*th, mu, f, b) == evalFormula(*th, nu, f, b));
  }
}

TEST_CASE("budgeted and exhaustive evaluation agree on finite theories") {
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    TheoryPtr th = kripkeTheory(randomKripkeModel(rng, 4));
    for (int j = 0; j < 30; ++j) {
      Formula f = randomFormula(*th, rng, 3);
      bool valid = isValidExhaustive(*th, f);
      bool budgeted = true;
      for (const State& s : th->enumerateStates())
        budgeted = budgeted &&
                   evalFormula(*th, s, f, EvalBudget::withWindow(-2, 2)) ==
                       Verdict::True;
      CHECK(valid == budgeted);
    }
  }
}

TEST_CASE("derived connective expansion is stable") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  Formula f = parseFormula("0 <= v", *th);
  Program p = parseProgram("w := v + 1", *th);
  Formula dia = Formula::diamond(p, f);
  CHECK(dia.structurallyEqual(
      Formula::mkNot(Formula::box(p, Formula::mkNot(f)))));
  // expanding the already-expanded form changes nothing
  auto view = dia.asDiamond();
  REQUIRE(view.has_value());
  CHECK(Formula::diamond(view->first, view->second).structurallyEqual(dia));
}

TEST_CASE("zero budget is rejected") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  EvalBudget b;
  b.quantCap = 0;
  CHECK_THROWS_AS(
      evalFormula(*th, th->initialState(), parseFormula("0 <= v", *th), b),
      TheoryError);
}
