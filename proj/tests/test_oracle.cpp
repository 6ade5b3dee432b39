#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynth/hetero.hpp"
#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"

using namespace dynth;

TEST_CASE("falsification finds havoc counterexamples") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  Formula f = parseFormula("[v := *] 0 <= v", *th);
  auto ce = falsify(*th, f, EvalBudget::withWindow(-2, 2));
  REQUIRE(ce.has_value());
  // the recorded state and budget reproduce the refutation
  CHECK(evalFormula(*th, ce->state, f, ce->budget) == Verdict::False);
  CHECK_FALSE(ce->trace.empty());
}

TEST_CASE("valid formulas stay screened") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  Formula eq1 = parseFormula("0 <= v -> [w := v + 1] 1 <= w", *th);
  CHECK_FALSE(falsify(*th, eq1, EvalBudget::withWindow(-100, 100)).has_value());
}

TEST_CASE("the false literal is refuted at the default state") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  auto ce = falsify(*th, parseFormula("false", *th), EvalBudget{});
  REQUIRE(ce.has_value());
  CHECK(ce->state == th->initialState());
}

TEST_CASE("on finite theories, screened means exhaustively valid") {
  Rng rng(61);
  for (int i = 0; i < 25; ++i) {
    TheoryPtr th = liftRegular(liftHavoc(kripkeTheory(randomKripkeModel(rng, 4))));
    for (int j = 0; j < 20; ++j) {
      Formula f = randomFormula(*th, rng, 3);
      bool screened = !falsify(*th, f, EvalBudget{}).has_value();
      CHECK(screened == isValidExhaustive(*th, f));
    }
  }
}

TEST_CASE("identical seeds reproduce identical reports") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  AuditReport a = testCoincidence(th, 300, 99, true);
  AuditReport b = testCoincidence(th, 300, 99, true);
  CHECK(a.str() == b.str());
  AuditReport c = validateAxiomSchemas(15, 99, true);
  AuditReport d = validateAxiomSchemas(15, 99, true);
  CHECK(c.str() == d.str());
}

TEST_CASE("the serial reference runner matches the parallel one") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  CHECK(testCoincidence(th, 250, 7, false).str() ==
        testCoincidence(th, 250, 7, true).str());
  CHECK(testBoundedEffect(th, 250, 7, false).str() ==
        testBoundedEffect(th, 250, 7, true).str());
  CHECK(validateAxiomSchemas(10, 7, false).str() ==
        validateAxiomSchemas(10, 7, true).str());

  // and on a corrupted theory the same failures are reported in order
  TheoryPtr bad = corruptProgBv(semiringTheory(Carrier::Int));
  CHECK(testBoundedEffect(bad, 200, 7, false).str() ==
        testBoundedEffect(bad, 200, 7, true).str());
}

TEST_CASE("negative control: an unsound V instance is refuted") {
  TheoryPtr th = semiringTheory(Carrier::Int);
  // f reads the bound variable; the side condition would reject this
  Formula f = parseFormula("0 <= v -> [v := v + (-1)] 0 <= v", *th);
  auto ce = falsify(*th, f, EvalBudget::withWindow(-4, 4));
  REQUIRE(ce.has_value());
  CHECK(ce->state.get(VarId::intern("v")) == 0);
}

TEST_CASE("lemma suites pass on both instance families") {
  TheoryPtr sem = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  CHECK(testCoincidence(sem, 500, 3).ok());
  CHECK(testBoundedEffect(sem, 500, 3).ok());
  Rng rng(71);
  TheoryPtr kk = liftRegular(liftHavoc(kripkeTheory(randomKripkeModel(rng))));
  CHECK(testCoincidence(kk, 500, 3).ok());
  CHECK(testBoundedEffect(kk, 500, 3).ok());
}

TEST_CASE("corrupted declarations produce witnessed lemma failures") {
  TheoryPtr badFv = corruptProgFv(semiringTheory(Carrier::Int));
  AuditReport a = testCoincidence(badFv, 400, 3);
  CHECK_FALSE(a.ok());

  TheoryPtr badBv = corruptProgBv(semiringTheory(Carrier::Int));
  AuditReport b = testBoundedEffect(badBv, 400, 3);
  CHECK_FALSE(b.ok());
  REQUIRE_FALSE(b.results[0].witnesses.empty());
  CHECK(b.results[0].witnesses[0].find("writes outside") != std::string::npos);
}

TEST_CASE("counterexample shrinking keeps the refutation") {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
  Formula f = parseFormula("[v := *] v <= 20", *th);
  EvalBudget wide = EvalBudget::withWindow(-100, 100);
  auto ce = falsify(*th, f, wide);
  REQUIRE(ce.has_value());
  CHECK(ce->budget.window.hi <= wide.window.hi);
  CHECK(evalFormula(*th, ce->state, f, ce->budget) == Verdict::False);
}

TEST_CASE("schema audit is clean at a moderate trial count") {
  AuditReport rep = validateAxiomSchemas(60, 2024, true);
  CHECK_MESSAGE(rep.ok(), rep.str());
  CHECK(rep.results.size() == axiomSchemaNames().size());
}
