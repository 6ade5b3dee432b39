// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dynth/hetero.hpp"
#include "dynth/instance_calculus.hpp"
#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"
#include "dynth/script.hpp"

#ifndef DYNTH_SCRIPT_DIR
#define DYNTH_SCRIPT_DIR "scripts"
#endif

using namespace dynth;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok, double seconds,
            const std::string& detail = "") {
  std::printf("%s  criterion %2d: %s  (%.1fs)\n", ok ? "PASS" : "FAIL",
              criterion, what.c_str(), seconds);
  if (!ok) {
    ++failures;
    if (!detail.empty()) std::printf("      %s\n", detail.c_str());
  }
}

double runTimed(const std::function<bool(std::string&)>& fn, bool& ok,
                std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  ok = fn(detail);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void criterionTimed(int n, const std::string& what, double maxSeconds,
                    const std::function<bool(std::string&)>& fn) {
  bool ok = false;
  std::string detail;
  double secs = runTimed(fn, ok, detail);
  if (maxSeconds > 0 && secs > maxSeconds) {
    ok = false;
    detail += " (exceeded the " + std::to_string(maxSeconds) + "s budget)";
  }
  report(n, what, ok, secs, detail);
}

std::string scriptPath(const char* name) {
  return std::string(DYNTH_SCRIPT_DIR) + "/" + name;
}

// --- criterion 8 helpers -----------------------------------------------------

// Star-free random programs, size counted in grammar nodes. Programs that
// contain a sequential composition draw from a two-variable pool so the
// existential layers of their renditions stay enumerable.
Program randomStarFree(const Theory& th, Rng& rng, const std::vector<VarId>& pool,
                       int maxNodes, bool* usedSeq) {
  const Theory* sem = underlyingSemiring(th);
  auto term = [&]() -> TermPtr {
    switch (rng.range(0, 2)) {
      case 0:
        return termLit(rng.range(-2, 2));
      case 1:
        return termVar(pool[rng.next() % pool.size()]);
      default:
        return termAdd(termVar(pool[rng.next() % pool.size()]),
                       termLit(rng.range(-2, 2)));
    }
  };
  auto leaf = [&]() -> Program {
    if (rng.chance(0.3))
      return *th.havocProgram(pool[rng.next() % pool.size()]);
    return regBase(th, *th.base()->embedProgramFromBase(
                           semiringAssign(*sem, pool[rng.next() % pool.size()],
                                          term())));
  };
  if (maxNodes < 3) return leaf();
  switch (rng.range(0, 3)) {
    case 0: {
      *usedSeq = true;
      return regSeq(th, randomStarFree(th, rng, pool, maxNodes - 2, usedSeq),
                    randomStarFree(th, rng, pool, 1, usedSeq));
    }
    case 1:
      return regChoice(th, randomStarFree(th, rng, pool, maxNodes - 2, usedSeq),
                       randomStarFree(th, rng, pool, 1, usedSeq));
    case 2: {
      Formula guard = Formula::atom(
          semiringLeq(*sem, term(), term()));
      if (rng.chance(0.4)) guard = Formula::mkNot(guard);
      return regTest(th, guard);
    }
    default:
      return leaf();
  }
}

bool renditionEquivalence(std::string& detail) {
  TheoryPtr th = liftRegular(liftHavoc(semiringTheory(Carrier::Int, {-3, 3})));
  // Both routes read the relation over [-3,3]^2; havocked and existential
  // intermediate values range over the same widened universe [-6,6], which
  // covers every one-step image of the window under the generated terms.
  EvalBudget transitions = EvalBudget::withWindow(-6, 6);
  EvalBudget quantifiers = EvalBudget::withWindow(-6, 6);
  const Value lo = -3, hi = 3;

  int checked = 0;
  for (int trial = 0; checked < 100 && trial < 400; ++trial) {
    Rng rng(mixSeed(0xbead, trial));
    // variable pool: up to three variables, two when a seq shows up
    std::vector<VarId> pool3{VarId::intern("v"), VarId::intern("w"),
                             VarId::intern("x")};
    std::vector<VarId> pool(pool3.begin(),
                            pool3.begin() + rng.range(1, 3));
    bool usedSeq = false;
    Program p = randomStarFree(*th, rng, pool, 4, &usedSeq);
    if (usedSeq && pool.size() > 2) continue;

    VarSetBase xsSet = th->progFv(p);
    xsSet.unite(th->progBv(p));
    std::vector<VarId> xs = xsSet.items();
    if (xs.empty()) xs.push_back(pool[0]);
    std::vector<VarId> xsNext;
    for (VarId v : xs) xsNext.push_back(VarId::intern(v.name() + "'0"));
    Formula rendition;
    try {
      rendition = renditionLoopfree(*th, p, xs, xsNext);
    } catch (const TheoryError&) {
      continue;
    }
    ++checked;

    // all assignments of xs over the window
    std::vector<State> preStates{th->initialState()};
    for (VarId v : xs) {
      std::vector<State> next;
      for (const State& s : preStates)
        for (Value val = lo; val <= hi; ++val) next.push_back(s.with(v, val));
      preStates = std::move(next);
    }

    auto inWindow = [&](const State& s) {
      for (VarId v : xs)
        if (s.get(v) < lo || s.get(v) > hi) return false;
      return true;
    };

    std::set<std::pair<State, State>> brute, characterized;
    for (const State& mu : preStates) {
      for (const State& nu : th->progSucc(mu, p, transitions).states)
        if (inWindow(nu)) brute.emplace(mu, nu);
      for (const State& nuProto : preStates) {
        // twin state: xsNext picks up nu's values, everything else is mu
        State nu = mu;
        State twin = mu;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          nu.set(xs[i], nuProto.get(xs[i]));
          twin.set(xsNext[i], nuProto.get(xs[i]));
        }
        if (evalFormula(*th, twin, rendition, quantifiers) == Verdict::True)
          characterized.emplace(mu, nu);
      }
    }
    if (brute != characterized) {
      detail = "discrepancy for program " + printProgram(p, *th) + " (" +
               std::to_string(brute.size()) + " vs " +
               std::to_string(characterized.size()) + " transitions)";
      return false;
    }
  }
  if (checked < 100) {
    detail = "only " + std::to_string(checked) + " programs generated";
    return false;
  }
  return true;
}

// --- criterion 9 helper --------------------------------------------------------

bool smokeScript(const char* file, const EvalBudget& budget, std::string& detail,
                 int* theoremCount) {
  ScriptResult res = runScriptFile(scriptPath(file), budget);
  if (!res.success) {
    detail = std::string(file) + ": " + res.error;
    return false;
  }
  std::map<std::string, bool> screenCache;
  auto screened = [&](const Theory& th, const Formula& f) {
    std::string key = std::to_string(th.id()) + "|" + printFormula(f, th);
    auto it = screenCache.find(key);
    if (it != screenCache.end()) return it->second;
    bool ok = !falsify(th, f, budget).has_value();
    screenCache.emplace(std::move(key), ok);
    return ok;
  };
  for (const StepRecord& step : res.steps) {
    bool gammaScreened = true;
    for (const Formula& g : step.thm.gamma())
      gammaScreened = gammaScreened && screened(*step.theory, g);
    if (!gammaScreened) continue;
    if (falsify(*step.theory, step.thm.conclusion(), budget)) {
      detail = std::string(file) + " step " + std::to_string(step.index) +
               " (" + step.op + "): screened gamma but refutable conclusion";
      return false;
    }
    ++*theoremCount;
  }
  return true;
}

}  // namespace

int main() {
  std::printf("== acceptance suite ==\n");

  // 1. axiom soundness audit
  criterionTimed(1, "axiom soundness audit (500 trials, seed 7)", 120,
                 [&](std::string& detail) {
                   AuditReport rep = validateAxiomSchemas(500, 7, true);
                   if (!rep.ok()) detail = rep.str();
                   return rep.ok();
                 });

  // 2. coincidence / bounded-effect lemma suites + negative controls
  criterionTimed(2, "coincidence and bounded-effect suites (10^4 trials)", 0,
                 [&](std::string& detail) {
                   TheoryPtr sem =
                       liftRegular(liftHavoc(semiringTheory(Carrier::Int)));
                   Rng rng(2);
                   TheoryPtr kk = liftRegular(
                       liftHavoc(kripkeTheory(randomKripkeModel(rng))));
                   for (const TheoryPtr& th : {sem, kk}) {
                     AuditReport a = testCoincidence(th, 10000, 7);
                     AuditReport b = testBoundedEffect(th, 10000, 7);
                     if (!a.ok() || !b.ok()) {
                       detail = a.str() + b.str();
                       return false;
                     }
                   }
                   // the three shipped negative controls must be witnessed
                   TheoryPtr core = semiringTheory(Carrier::Int);
                   AuditReport c1 =
                       testCoincidence(corruptAtomFv(core), 2000, 7);
                   AuditReport c2 =
                       testCoincidence(corruptProgFv(core), 2000, 7);
                   AuditReport c3 =
                       testBoundedEffect(corruptProgBv(core), 2000, 7);
                   bool detected = !c1.ok() && !c2.ok() && !c3.ok();
                   bool witnessed = true;
                   for (const AuditReport* r : {&c1, &c2, &c3}) {
                     bool any = false;
                     for (const auto& res : r->results)
                       any = any || !res.witnesses.empty();
                     witnessed = witnessed && any;
                   }
                   if (!detected || !witnessed)
                     detail = "a corrupted declaration went undetected";
                   return detected && witnessed;
                 });

  // 3. star semantics: fixpoint equals the union of unrollings
  criterionTimed(3, "star fixpoint = union of unrollings (kripke corpus)", 0,
                 [&](std::string& detail) {
                   for (int m = 0; m < 40; ++m) {
                     Rng rng(mixSeed(3, m));
                     TheoryPtr core = kripkeTheory(randomKripkeModel(rng, 4));
                     TheoryPtr th = liftRegular(liftHavoc(core));
                     int stateCount =
                         static_cast<int>(core->enumerateStates().size());
                     for (int k = 0; k < 10; ++k) {
                       Program p = th->sampleProgram(rng, 2);
                       for (const State& from : core->enumerateStates()) {
                         if (starFixpoint(*th, p, from) !=
                             starUnrollings(*th, p, from, stateCount)) {
                           detail = "mismatch on " + printProgram(p, *th);
                           return false;
                         }
                       }
                     }
                   }
                   return true;
                 });

  // 4. eq1 replica
  criterionTimed(4, "eq1 script proves and screens at [-100,100]", 0,
                 [&](std::string& detail) {
                   EvalBudget b = EvalBudget::withWindow(-100, 100);
                   ScriptResult res = runScriptFile(scriptPath("eq1.hdl"), b);
                   if (!res.success || !res.gammaFullyScreened()) {
                     detail = res.error;
                     return false;
                   }
                   auto ce = falsify(*res.theory,
                                     res.finalTheorem->conclusion(), b);
                   if (ce) detail = "conclusion refuted at " + ce->state.str();
                   return !ce;
                 });

  // 5. gauss replica
  criterionTimed(5, "gauss script closes; no counterexample for n in [1,25]",
                 60, [&](std::string& detail) {
                   EvalBudget b = EvalBudget::withWindow(-40, 40);
                   ScriptResult res = runScriptFile(scriptPath("gauss.hdl"), b);
                   if (!res.success || !res.gammaFullyScreened()) {
                     detail = res.error;
                     return false;
                   }
                   EvalBudget f = EvalBudget::withWindow(0, 25);
                   f.starDepth = 30;
                   auto ce = falsify(*res.theory,
                                     res.finalTheorem->conclusion(), f);
                   if (ce) detail = "conclusion refuted at " + ce->state.str();
                   return !ce;
                 });

  // 6. countdown replica
  criterionTimed(6, "countdown script closes via the convergence axiom", 0,
                 [&](std::string& detail) {
                   EvalBudget b = EvalBudget::withWindow(-8, 8);
                   ScriptResult res =
                       runScriptFile(scriptPath("countdown.hdl"), b);
                   if (!res.success || !res.gammaFullyScreened()) {
                     detail = res.error;
                     return false;
                   }
                   EvalBudget f = EvalBudget::withWindow(0, 20);
                   f.starDepth = 30;
                   auto ce = falsify(*res.theory,
                                     res.finalTheorem->conclusion(), f);
                   if (ce) detail = "conclusion refuted at " + ce->state.str();
                   return !ce;
                 });

  // 7. heterogeneous safety replica
  criterionTimed(
      7, "heterogeneous stop script; falsifier at [-50,50] x [-50,50]", 180,
      [&](std::string& detail) {
        EvalBudget b;
        b.window0 = Window{-50, 50};
        b.window1 = Window{-50, 50};
        b.starDepth = 8;
        b.productCap = 250000;
        ScriptResult res = runScriptFile(scriptPath("hetero_stop.hdl"), b);
        if (!res.success || !res.gammaFullyScreened()) {
          detail = res.error;
          return false;
        }
        auto ce = falsify(*res.theory, res.finalTheorem->conclusion(), b);
        if (ce) detail = "conclusion refuted at " + ce->state.str();
        return !ce;
      });

  // 8. rendition equivalence
  criterionTimed(8, "rendition equivalence on 100 star-free programs", 0,
                 renditionEquivalence);

  // 9. kernel soundness smoke test over the shipped scripts
  criterionTimed(
      9, "kernel soundness smoke test across all shipped scripts", 0,
      [&](std::string& detail) {
        int theorems = 0;
        EvalBudget eq1B = EvalBudget::withWindow(-100, 100);
        EvalBudget gaussB = EvalBudget::withWindow(-30, 30);
        EvalBudget countB = EvalBudget::withWindow(-8, 8);
        EvalBudget hetB;
        hetB.window0 = Window{-40, 40};
        hetB.window1 = Window{-40, 40};
        hetB.starDepth = 8;
        hetB.productCap = 60000;
        bool ok = smokeScript("eq1.hdl", eq1B, detail, &theorems) &&
                  smokeScript("gauss.hdl", gaussB, detail, &theorems) &&
                  smokeScript("countdown.hdl", countB, detail, &theorems) &&
                  smokeScript("hetero_stop.hdl", hetB, detail, &theorems);
        if (ok)
          std::printf("      (%d screened theorems, zero violations)\n",
                      theorems);
        return ok;
      });

  // 10. parser round-trip
  criterionTimed(
      10, "parse/print round-trip, 10^4 formulas and programs per theory", 0,
      [&](std::string& detail) {
        Rng seedRng(10);
        TheoryPtr instances[] = {
            semiringTheory(Carrier::Int),
            kripkeTheory(randomKripkeModel(seedRng))};
        for (const TheoryPtr& th : instances) {
          Rng rng(2026);
          for (int i = 0; i < 10000; ++i) {
            Formula f = randomFormula(*th, rng, 4);
            Formula g = parseFormula(printFormula(f, *th), *th);
            if (!g.structurallyEqual(f)) {
              detail = "formula round-trip failed: " + printFormula(f, *th);
              return false;
            }
            Program p = th->sampleProgram(rng, 3);
            Program q = parseProgram(printProgram(p, *th), *th);
            if (!q.structurallyEqual(p)) {
              detail = "program round-trip failed: " + printProgram(p, *th);
              return false;
            }
          }
        }
        return true;
      });

  std::printf("== %s ==\n", failures == 0 ? "all criteria passed"
                                          : "ACCEPTANCE FAILURES");
  return failures == 0 ? 0 : 1;
}
