#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "dynth/hetero.hpp"
#include "dynth/instances.hpp"
#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"

using namespace dynth;

namespace {

std::vector<HeteroAtom> stdCouplings() {
  return {couplingEq(VarId::intern("c.x", 0), VarId::intern("p.x", 1)),
          couplingScaledEq(VarId::intern("c.p", 0), VarId::intern("p.gap", 1),
                           100)};
}

TheoryPtr simpleCombined() {
  return combine(semiringTheory(Carrier::Int), semiringTheory(Carrier::Int),
                 stdCouplings());
}

}  // namespace

TEST_CASE("coupling atoms relate the two components") {
  TheoryPtr th = simpleCombined();
  const auto* ct = combinedOf(*th);
  VarId cx = VarId::intern("c.x", 0), px = VarId::intern("p.x", 1);
  Atom eq = ct->couplingAtom(0);

  State hit = th->initialState().with(cx, 5).with(px, 5);
  State miss = th->initialState().with(cx, 5).with(px, 4);
  CHECK(th->atomEval(hit, eq));
  CHECK_FALSE(th->atomEval(miss, eq));

  // scaled: 300 = 100 * 3
  Atom scaled = ct->couplingAtom(1);
  State s = th->initialState()
                .with(VarId::intern("c.p", 0), 300)
                .with(VarId::intern("p.gap", 1), 3);
  CHECK(th->atomEval(s, scaled));
  CHECK_FALSE(th->atomEval(s.with(VarId::intern("p.gap", 1), 4), scaled));
}

TEST_CASE("coupling builders reject ill-formed arguments") {
  CHECK_THROWS_AS(couplingEq(VarId::intern("c.x", 0), VarId::intern("c.y", 0)),
                  TheoryError);
  CHECK_THROWS_AS(
      couplingScaledEq(VarId::intern("c.x", 0), VarId::intern("p.x", 1), 0),
      TheoryError);
}

TEST_CASE("world programs leave the other component untouched") {
  TheoryPtr th = simpleCombined();
  Program p = parseProgram("c.x := c.x + 1", *th);
  VarId cx = VarId::intern("c.x", 0), px = VarId::intern("p.x", 1);
  State s = th->initialState().with(cx, 0).with(px, 9);
  auto succ = th->progSucc(s, p, EvalBudget{});
  REQUIRE(succ.states.size() == 1);
  CHECK(succ.states[0].get(cx) == 1);
  CHECK(succ.states[0].get(px) == 9);

  // world isolation over random programs and states
  Rng rng(3);
  EvalBudget b = EvalBudget::withWindow(-5, 5);
  const auto* ct = combinedOf(*th);
  for (int i = 0; i < 300; ++i) {
    int world = i % 2;
    Program wp = ct->wrapWorldProgram(
        world, ct->world(world)->sampleProgram(rng, 1));
    State mu = th->sampleState(rng, b);
    for (const State& nu : th->progSucc(mu, wp, b).states) {
      State before = ct->projectWorld(1 - world, mu);
      State after = ct->projectWorld(1 - world, nu);
      CHECK(before == after);
    }
  }
}

TEST_CASE("pure world formulas ignore the opposite component") {
  TheoryPtr th = simpleCombined();
  Formula f = parseFormula("0 <= c.x", *th);
  Rng rng(9);
  EvalBudget b = EvalBudget::withWindow(-10, 10);
  State base = th->initialState().with(VarId::intern("c.x", 0), 3);
  Verdict expected = evalFormula(*th, base, f, b);
  const auto* ct = combinedOf(*th);
  for (int i = 0; i < 100; ++i) {
    State right = ct->world(1)->sampleState(rng, b);
    State mixed = ct->injectWorld(1, base, right);
    CHECK(evalFormula(*th, mixed, f, b) == expected);
  }
}

TEST_CASE("combined theories pass the law audit") {
  TheoryPtr th = simpleCombined();
  LawReport rep = checkTheoryLaws(*th, 500, 21);
  CHECK_MESSAGE(rep.ok(), rep.str());

  TheoryPtr full = fullHetero(semiringTheory(Carrier::Int),
                              semiringTheory(Carrier::Int), stdCouplings());
  LawReport rep2 = checkTheoryLaws(*full, 400, 22);
  CHECK_MESSAGE(rep2.ok(), rep2.str());
}

TEST_CASE("the heterogeneous loop shape parses and evaluates") {
  TheoryPtr th = fullHetero(semiringTheory(Carrier::Int),
                            semiringTheory(Carrier::Int),
                            {couplingScaledEq(VarId::intern("c.gap", 0),
                                              VarId::intern("p.gap", 1), 2),
                             couplingScaledEq(VarId::intern("c.cmd", 0),
                                              VarId::intern("p.v", 1), 2)});
  Formula f = parseFormula(
      "0 <= p.gap & scaled_eq(c.gap, p.gap, 2) -> "
      "[(c.cmd := c.gap; p.v := *; ?(scaled_eq(c.cmd, p.v, 2)); "
      "p.gap := p.gap + (-1) * p.v; c.gap := *; "
      "?(scaled_eq(c.gap, p.gap, 2)))*] 0 <= p.gap",
      *th);
  EvalBudget b = EvalBudget::withWindow(-6, 6);
  b.starDepth = 6;
  VarId cg = VarId::intern("c.gap", 0), pg = VarId::intern("p.gap", 1);
  State coupled = th->initialState().with(cg, 6).with(pg, 3);
  CHECK(evalFormula(*th, coupled, f, b) != Verdict::False);
  // round-trip of the printed form
  Formula reparsed = parseFormula(printFormula(f, *th), *th);
  CHECK(reparsed.structurallyEqual(f));
}

TEST_CASE("box over a star mixing both worlds is exact on a small product") {
  // both worlds finite: two Kripke frames
  KripkeModel m0;
  m0.states = {"s0", "s1"};
  m0.programs = {{"a", {{0, 1}, {1, 0}}}};
  m0.atoms = {{"q", {1}}};
  KripkeModel m1;
  m1.states = {"t0", "t1", "t2"};
  m1.programs = {{"b", {{0, 1}, {1, 2}, {2, 2}}}};
  m1.atoms = {{"r", {2}}};
  TheoryPtr th = fullHetero(kripkeTheory(m0), kripkeTheory(m1),
                            {couplingEq(VarId::intern("c.@w", 0),
                                        VarId::intern("p.@w", 1))});
  CHECK(th->finiteEnumerable());
  CHECK(th->enumerateStates().size() == 6);
  Formula f = parseFormula("[(c.a; p.b)*] (p.r | !p.r)", *th);
  CHECK(isValidExhaustive(*th, f));
  // q stays reachable parity-wise; just check evaluation is exact
  Formula g = parseFormula("<(c.a; p.b)*> p.r", *th);
  State s = th->initialState();
  CHECK(evalFormula(*th, s, g, EvalBudget{}) == Verdict::True);
}

TEST_CASE("embedded pure world theorems stay true state-wise") {
  TheoryPtr w0 = semiringTheory(Carrier::Int);
  TheoryPtr th = fullHetero(w0, semiringTheory(Carrier::Int), stdCouplings());
  Formula eq1 = parseFormula("0 <= v -> [w := v + 1] 1 <= w", *w0);
  Formula lifted = embedWorldFormula(*th, 0, eq1);
  EvalBudget b = EvalBudget::withWindow(-8, 8);
  Rng rng(15);
  for (int i = 0; i < 150; ++i) {
    State s = th->sampleState(rng, b);
    CHECK(evalFormula(*th, s, lifted, b) == Verdict::True);
  }
  CHECK(printFormula(lifted, *th) == "0 <= c.v -> [c.w := c.v + 1] (1 <= c.w)");
}

TEST_CASE("world purity checks name the first foreign symbol") {
  TheoryPtr th = simpleCombined();
  Formula mixed = parseFormula("0 <= c.x & 0 <= p.x", *th);
  std::string offender;
  CHECK_FALSE(formulaPureWorld(*th, mixed, 0, &offender));
  CHECK(offender.find("p.x") != std::string::npos);
  Formula pure = parseFormula("0 <= c.x", *th);
  CHECK(formulaPureWorld(*th, pure, 0, &offender));
  CHECK_FALSE(formulaPureWorld(*th, pure, 1, &offender));
  // couplings are never pure
  Formula cpl = parseFormula("eq(c.x, p.x)", *th);
  CHECK_FALSE(formulaPureWorld(*th, cpl, 0, &offender));
}

TEST_CASE("counting formulas project onto the chosen side") {
  TheoryPtr th = fullHetero(semiringTheory(Carrier::Int),
                            semiringTheory(Carrier::Int), stdCouplings());
  auto side0 = heteroInductiveInstance(0, *th);
  VarId cn = VarId::intern("c.v", 0);
  CHECK(side0->isCountingVar(cn));
  CHECK_FALSE(side0->isCountingVar(VarId::intern("p.v", 1)));
  CHECK(printFormula(side0->natGt0(cn), *th) == "1 <= c.v");

  auto side1 = heteroInductiveInstance(1, *th);
  for (VarId v : side1->countingPool) CHECK(v.world() == 1);

  // natEq agrees with the u2n reading on random product states
  EvalBudget b = EvalBudget::withWindow(-20, 20);
  Rng rng(19);
  VarId cm = VarId::intern("c.w", 0);
  Formula eqF = side0->natEq(cn, cm);
  for (int i = 0; i < 1000; ++i) {
    State s = th->sampleState(rng, b);
    bool sem = evalFormula(*th, s, eqF, b) == Verdict::True;
    bool u2n = side0->u2n(s.get(cn)) == side0->u2n(s.get(cm));
    CHECK(sem == u2n);
  }
}

TEST_CASE("the full combination is the regular closure of the havoc lift") {
  TheoryPtr w0 = semiringTheory(Carrier::Int);
  TheoryPtr w1 = semiringTheory(Carrier::Int);
  TheoryPtr full = fullHetero(w0, w1, stdCouplings());
  CHECK(full->regularLifted());
  CHECK(full->base()->kind() == Theory::Kind::HavocLift);
  CHECK(full->base()->base()->kind() == Theory::Kind::Combined);

  // successor sets of the composed construction match a by-hand mix of
  // both worlds' programs at small windows
  TheoryPtr manual = liftRegular(liftHavoc(combine(w0, w1, stdCouplings())));
  EvalBudget b = EvalBudget::withWindow(-2, 2);
  Rng rngA(29), rngB(29);
  for (int i = 0; i < 120; ++i) {
    Program pa = full->sampleProgram(rngA, 2);
    Program pb = manual->sampleProgram(rngB, 2);
    State sa = full->sampleState(rngA, b);
    State sb = manual->sampleState(rngB, b);
    CHECK(sa == sb);
    auto ra = full->progSucc(sa, pa, b);
    auto rb = manual->progSucc(sb, pb, b);
    CHECK(ra.states == rb.states);
    CHECK(ra.truncated == rb.truncated);
  }
}

TEST_CASE("prefix collisions are rejected") {
  CHECK_THROWS_AS(combine(semiringTheory(Carrier::Int),
                          semiringTheory(Carrier::Int), {}, "c.", "c."),
                  TheoryError);
  CHECK_THROWS_AS(combine(semiringTheory(Carrier::Int),
                          semiringTheory(Carrier::Int), {}, "c.", "c.x."),
                  TheoryError);
  // a coupling over unknown variables is rejected at combine time
  HeteroAtom bogus = couplingEq(VarId::intern("c.x", 0), VarId::intern("p.x", 1));
  bogus.declaredFv = {VarId::intern("nowhere.y", 0)};
  CHECK_THROWS_AS(
      combine(semiringTheory(Carrier::Int), semiringTheory(Carrier::Int),
              {bogus}),
      TheoryError);
}
