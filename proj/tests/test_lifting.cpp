#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "dynth/instances.hpp"
#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"

using namespace dynth;

namespace {

TheoryPtr chainKripke() {
  // s0 -a-> s1 -a-> s2, b: s1 -> s0
  KripkeModel m;
  m.states = {"s0", "s1", "s2"};
  m.programs = {{"a", {{0, 1}, {1, 2}}}, {"b", {{1, 0}}}};
  m.atoms = {{"q", {2}}};
  return kripkeTheory(m);
}

std::set<State> succSet(const Theory& th, const State& s, const Program& p,
                        const EvalBudget& b) {
  auto r = th.progSucc(s, p, b);
  return {r.states.begin(), r.states.end()};
}

}  // namespace

TEST_CASE("havoc successors enumerate the window") {
  TheoryPtr th = liftHavoc(semiringTheory(Carrier::Int));
  VarId v = VarId::intern("v");
  EvalBudget b = EvalBudget::withWindow(-2, 2);
  auto succ = th->progSucc(th->initialState(), *th->havocProgram(v), b);
  CHECK(succ.states.size() == 5);
  CHECK(succ.truncated);  // the window never exhausts the integers
  std::set<Value> values;
  for (const State& s : succ.states) values.insert(s.get(v));
  CHECK(values == std::set<Value>{-2, -1, 0, 1, 2});
}

TEST_CASE("base-wrapped programs behave identically across the lift") {
  TheoryPtr base = semiringTheory(Carrier::Int);
  TheoryPtr th = liftHavoc(base);
  Program inner = parseProgram("w := v + 1", *base);
  Program wrapped = *th->embedProgramFromBase(inner);
  EvalBudget b;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    State s = base->sampleState(rng, b);
    CHECK(base->progSucc(s, inner, b).states ==
          th->progSucc(s, wrapped, b).states);
  }
}

TEST_CASE("havoc boxes evaluate like universal quantifiers") {
  TheoryPtr th = liftHavoc(semiringTheory(Carrier::Int));
  VarId v = VarId::intern("v");
  Formula body = parseFormula("0 <= v", *th);
  Formula boxed = Formula::box(*th->havocProgram(v), body);
  Formula quantified = Formula::forall(v, body);
  EvalBudget b = EvalBudget::withWindow(-5, 5);
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    State s = th->sampleState(rng, b);
    CHECK(evalFormula(*th, s, boxed, b) == evalFormula(*th, s, quantified, b));
  }
}

TEST_CASE("star reachability on a Kripke frame") {
  TheoryPtr core = chainKripke();
  TheoryPtr th = liftRegular(liftHavoc(core));
  VarId w = kripkeWorldVar(*core);
  State s0 = th->initialState();

  Program ab = parseProgram("a; b", *th);
  auto loop = starFixpoint(*th, ab, s0);
  // a;b from s0 reaches s0 again; the closure is just {s0}
  CHECK(loop == std::vector<State>{s0});

  Program a = parseProgram("a", *th);
  CHECK(starFixpoint(*th, a, s0).size() == 3);  // s0, s1, s2

  Program b = parseProgram("b", *th);
  CHECK(starFixpoint(*th, b, s0) == std::vector<State>{s0});  // no b-step at s0

  State s1 = s0.with(w, 1);
  CHECK(starFixpoint(*th, b, s1).size() == 2);
}

TEST_CASE("tests filter successor sets") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  Formula never = Formula::mkNot(*th->verum());
  Program test = regTest(*th, never);
  EvalBudget b;
  CHECK(th->progSucc(th->initialState(), test, b).states.empty());

  Program testTrue = regTest(*th, *th->verum());
  auto same = th->progSucc(th->initialState(), testTrue, b);
  CHECK(same.states == std::vector<State>{th->initialState()});
}

TEST_CASE("bound and free variables of regular programs") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  VarId x = VarId::intern("x");
  Program p = parseProgram("(x := x + 1; ?(0 <= x))*", *th);
  CHECK(th->progBv(p) == VarSetBase{x});
  CHECK(th->progFv(p) == VarSetBase{x});

  Program q = parseProgram("?(0 <= v) ++ w := 1", *th);
  CHECK(th->progBv(q) == VarSetBase{VarId::intern("w")});
  CHECK(th->progFv(q) == VarSetBase{VarId::intern("v")});
}

TEST_CASE("star fixpoint equals the union of unrollings") {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    TheoryPtr core = kripkeTheory(randomKripkeModel(rng, 4));
    TheoryPtr th = liftRegular(liftHavoc(core));
    Program p = th->sampleProgram(rng, 2);
    int stateCount = static_cast<int>(core->enumerateStates().size());
    for (const State& from : core->enumerateStates()) {
      auto fix = starFixpoint(*th, p, from);
      auto unroll = starUnrollings(*th, p, from, stateCount);
      CHECK(fix == unroll);
      for (int n = 0; n < stateCount; ++n) {
        auto small = starUnrollings(*th, p, from, n);
        auto big = starUnrollings(*th, p, from, n + 1);
        CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
      }
    }
  }
}

TEST_CASE("successor-set algebra: seq assoc, choice comm, test idempotence") {
  Rng rng(41);
  EvalBudget b = EvalBudget::withWindow(-3, 3);
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  for (int i = 0; i < 60; ++i) {
    Program p = th->sampleProgram(rng, 1);
    Program q = th->sampleProgram(rng, 1);
    Program r = th->sampleProgram(rng, 1);
    State s = th->sampleState(rng, b);
    CHECK(succSet(*th, s, regSeq(*th, regSeq(*th, p, q), r), b) ==
          succSet(*th, s, regSeq(*th, p, regSeq(*th, q, r)), b));
    CHECK(succSet(*th, s, regChoice(*th, p, q), b) ==
          succSet(*th, s, regChoice(*th, q, p), b));
    Formula guard = randomFormula(*th, rng, 1, true);
    Program t = regTest(*th, guard);
    CHECK(succSet(*th, s, regSeq(*th, t, t), b) == succSet(*th, s, t, b));
  }
}

TEST_CASE("embedding preserves semantics and round-trips") {
  TheoryPtr base = semiringTheory(Carrier::Int);
  TheoryPtr havocTh = liftHavoc(base);
  TheoryPtr th = liftRegular(havocTh);
  EvalBudget b = EvalBudget::withWindow(-6, 6);
  Rng rng(53);

  Formula eq1 = parseFormula("0 <= v -> [w := v + 1] 1 <= w", *base);
  Formula embedded = embedFormula(embedFormula(eq1, *havocTh), *th);
  for (int i = 0; i < 100; ++i) {
    State s = base->sampleState(rng, b);
    CHECK(evalFormula(*th, s, embedded, b) == Verdict::True);
  }

  for (int i = 0; i < 200; ++i) {
    Formula f = randomFormula(*base, rng, 3);
    Formula up = embedFormula(embedFormula(f, *havocTh), *th);
    Formula down = unembedFormula(unembedFormula(up, *th), *havocTh);
    CHECK(down.structurallyEqual(f));
    State s = base->sampleState(rng, b);
    CHECK(evalFormula(*base, s, f, b) == evalFormula(*th, s, up, b));
  }

  Formula atom = Formula::atom(base->sampleAtom(rng));
  CHECK(embedFormula(atom, *havocTh).structurallyEqual(atom));
}

TEST_CASE("lifted theories pass the law audit") {
  TheoryPtr sem = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  LawReport rep = checkTheoryLaws(*sem, 400, 77);
  CHECK_MESSAGE(rep.ok(), rep.str());

  TheoryPtr krip = liftRegular(liftHavoc(chainKripke()));
  LawReport rep2 = checkTheoryLaws(*krip, 400, 78);
  CHECK_MESSAGE(rep2.ok(), rep2.str());
}

TEST_CASE("test payloads must be modality-free") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  Formula boxed = parseFormula("[w := 1] 0 <= w", *th);
  CHECK_THROWS_AS(regTest(*th, boxed), TheoryError);
}
