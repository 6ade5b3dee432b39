// Randomized soundness audit of the axiom and rule schemas: every trial
// builds a side-condition-respecting instantiation through the kernel and
// checks it semantically (exhaustively on finite Kripke theories, by
// bounded screening on windowed semiring theories).

#include <optional>
#include <string>

#include "dynth/hetero.hpp"
#include "dynth/instance_calculus.hpp"
#include "dynth/kernel.hpp"
#include "dynth/lifting.hpp"
#include "dynth/oracle.hpp"
#include "dynth/parser.hpp"

namespace dynth {

namespace {



EvalBudget semAuditBudget() {
  EvalBudget b = EvalBudget::withWindow(-2, 2);
  b.quantCap = 5;
  b.starDepth = 4;
  b.succCap = 20000;
  b.productCap = 150;
  return b;
}

struct Fixtures {
  TheoryPtr semCore = semiringTheory(Carrier::Int, {-20, 20});
  TheoryPtr sem = liftRegular(liftHavoc(semCore));
  TheoryPtr heteroSem;
  Fixtures() {
    std::vector<HeteroAtom> cpl{
        couplingEq(VarId::intern("c.x", 0), VarId::intern("p.x", 1)),
        couplingScaledEq(VarId::intern("c.v", 0), VarId::intern("p.v", 1), 2)};
    heteroSem = fullHetero(semiringTheory(Carrier::Int, {-20, 20}),
                           semiringTheory(Carrier::Int, {-20, 20}), cpl);
  }
};

const Fixtures& fixtures() {
  static Fixtures f;
  return f;
}

TheoryPtr randomKripkeLifted(Rng& rng, TheoryPtr* corePtr) {
  TheoryPtr core = kripkeTheory(randomKripkeModel(rng));
  if (corePtr) *corePtr = core;
  return liftRegular(liftHavoc(core));
}

TheoryPtr randomHeteroKripke(Rng& rng) {
  TheoryPtr w0 = kripkeTheory(randomKripkeModel(rng));
  TheoryPtr w1 = kripkeTheory(randomKripkeModel(rng));
  std::vector<HeteroAtom> cpl{
      couplingEq(VarId::intern("c.@w", 0), VarId::intern("p.@w", 1))};
  return fullHetero(std::move(w0), std::move(w1), cpl);
}

std::optional<std::string> checkConclusion(const Theory& th, const Formula& f) {
  if (th.finiteEnumerable()) {
    if (!isValidExhaustive(th, f))
      return "refuted exhaustively: " + printFormula(f, th);
    return std::nullopt;
  }
  auto ce = falsify(th, f, semAuditBudget());
  if (ce)
    return "counterexample at " + ce->state.str() + ": " +
           printFormula(f, th);
  return std::nullopt;
}

std::optional<std::string> checkTheorem(const Theory& th,
                                        const Theorem& t) {
  if (!t.gamma().empty()) return "unexpected nonempty gamma";
  return checkConclusion(th, t.conclusion());
}

// Retries a generator a few times when the sampled material violates a
// side condition; a trial that finds no admissible instance passes.
template <typename Fn>
std::optional<std::string> withRepair(Fn&& fn) {
  for (int attempt = 0; attempt < 12; ++attempt) {
    try {
      return fn();
    } catch (const KernelError&) {
      continue;  // side-condition rejection; resample
    } catch (const TheoryError&) {
      continue;
    }
  }
  return std::nullopt;
}

VarId freshVar(const char* name) { return VarId::intern(name); }

// A premise theorem that is valid by construction (used by the rule
// schemas G, M, MR, ind).
Theorem validPremise(const Theory& th, Rng& rng) {
  Formula f = randomFormula(th, rng, 2);
  Formula g = randomFormula(th, rng, 1);
  switch (rng.range(0, 2)) {
    case 0:
      return kernel::taut(th, Formula::implies(Formula::mkAnd(f, g), f));
    case 1:
      return kernel::taut(th, Formula::implies(f, Formula::mkOr(f, g)));
    default:
      return kernel::taut(th, Formula::mkOr(f, Formula::mkNot(f)));
  }
}

}  // namespace

std::optional<std::string> axiomSchemaTrial(const std::string& schema,
                                            std::uint64_t seed, int trial) {
  std::uint64_t schemaSalt = 0;
  for (char c : schema) schemaSalt = schemaSalt * 131 + c;
  Rng rng(mixSeed(seed ^ schemaSalt, trial));
  const bool onKripke = trial % 2 == 0;

  // Theories for this trial.
  const bool semOnly =
      schema == "C" || schema == "ghost" || schema == "identity-eq";
  TheoryPtr th;
  if (schema == "Fi")
    th = onKripke && !semOnly ? randomHeteroKripke(rng) : fixtures().heteroSem;
  else if (onKripke && !semOnly)
    th = randomKripkeLifted(rng, nullptr);
  else
    th = fixtures().sem;

  auto fml = [&](int depth, bool modalityFree = false) {
    return randomFormula(*th, rng, depth, modalityFree);
  };
  auto prog = [&](int depth) { return th->sampleProgram(rng, depth); };

  return withRepair([&]() -> std::optional<std::string> {
    if (schema == "G") {
      Theorem prem = validPremise(*th, rng);
      return checkTheorem(*th, kernel::ruleG(*th, prem, prog(1)));
    }
    if (schema == "K")
      return checkTheorem(*th, kernel::axK(*th, prog(1), fml(2), fml(2)));
    if (schema == "V")
      return checkTheorem(*th, kernel::axV(*th, prog(1), fml(2)));
    if (schema == "B") {
      Program p = prog(1);
      VarSetBase used = th->progFv(p);
      used.unite(th->progBv(p));
      for (VarId v : th->varPool())
        if (!used.contains(v))
          return checkTheorem(*th, kernel::axB(*th, p, v, fml(2)));
      return std::nullopt;
    }
    if (schema == "havoc") {
      VarId v = rng.pick(th->varPool());
      return checkTheorem(*th, kernel::axHavoc(*th, v, fml(2)));
    }
    if (schema == "test")
      return checkTheorem(*th, kernel::axTest(*th, fml(2, true), fml(2)));
    if (schema == "seq")
      return checkTheorem(*th, kernel::axSeq(*th, prog(1), prog(1), fml(2)));
    if (schema == "choice")
      return checkTheorem(*th, kernel::axChoice(*th, prog(1), prog(1), fml(2)));
    if (schema == "star")
      return checkTheorem(*th, kernel::axStar(*th, prog(1), fml(2)));
    if (schema == "I")
      return checkTheorem(*th, kernel::axI(*th, prog(1), fml(2)));
    if (schema == "C") {
      auto ind = th->inductive();
      VarId v = freshVar("cnt"), w = freshVar("hlp");
      return checkTheorem(*th,
                          kernel::axC(*th, *ind, prog(1), fml(1, true), v, w));
    }
    if (schema == "boxAnd")
      return checkTheorem(*th, kernel::axBoxAnd(*th, prog(1), fml(2), fml(2)));
    if (schema == "KDia")
      return checkTheorem(*th, kernel::axKDia(*th, prog(1), fml(2), fml(2)));
    if (schema == "MPDia") {
      Program p = prog(1);
      std::vector<VarId> vec = th->progBv(p).items();
      if (vec.empty()) vec.push_back(rng.pick(th->varPool()));
      return checkTheorem(*th, kernel::axMPDia(*th, p, fml(2), fml(2), vec));
    }
    if (schema == "M") {
      Theorem prem = validPremise(*th, rng);
      return checkTheorem(*th, kernel::ruleM(*th, prem, prog(1)));
    }
    if (schema == "MR") {
      Formula f0 = fml(2);
      Formula t = Formula::mkOr(f0, Formula::mkNot(f0));
      Program p = prog(1);
      Theorem boxed = kernel::ruleG(*th, kernel::taut(*th, t), p);
      Formula prem = Formula::implies(t, Formula::box(p, t));
      Theorem t1 = kernel::mp(
          *th, kernel::taut(*th, Formula::implies(boxed.conclusion(), prem)),
          boxed);
      Formula g = fml(1);
      Theorem t2 =
          kernel::taut(*th, Formula::implies(t, Formula::mkOr(t, g)));
      return checkTheorem(*th, kernel::ruleMR(*th, t1, t2));
    }
    if (schema == "PB") {
      Program p = prog(1);
      Formula phi = fml(1, true), psi = fml(1, true), xi = fml(1, true);
      VarSetBase vecSet = th->progBv(p);
      vecSet.unite(fvSyn(*th, Formula::diamond(p, phi)));
      std::vector<VarId> vec = vecSet.items();
      std::vector<VarId> vecPlus =
          fvSyn(*th, Formula::mkAnd(psi, xi)).minus(vecSet).items();
      return checkTheorem(*th, kernel::axPB(*th, p, phi, psi, xi, vec, vecPlus));
    }
    if (schema == "ind") {
      // valid premise of shape f -> [p]f, built from a tautology via G
      Formula f0 = fml(2);
      Formula t = Formula::mkOr(f0, Formula::mkNot(f0));
      Program p = prog(1);
      Theorem boxed = kernel::ruleG(*th, kernel::taut(*th, t), p);
      Formula prem = Formula::implies(t, Formula::box(p, t));
      Theorem stepThm = kernel::mp(
          *th, kernel::taut(*th, Formula::implies(boxed.conclusion(), prem)),
          boxed);
      return checkTheorem(*th, kernel::ruleInd(*th, stepThm));
    }
    if (schema == "Fi") {
      const CombinedTheory* ct = combinedOf(*th);
      int i = static_cast<int>(rng.range(0, 1));
      const Theory* frameWorld = ct->world(i);
      const Theory* progWorld = ct->world(1 - i);
      Rng wrng(rng.next());
      Program alpha =
          embedWorldProgram(*th, 1 - i, progWorld->sampleProgram(wrng, 1));
      Formula frame =
          embedWorldFormula(*th, i, randomFormula(*frameWorld, wrng, 2));
      return checkTheorem(*th,
                          kernel::axFi(*th, i, alpha, fml(2), fml(2), frame));
    }
    if (schema == "ghost") {
      VarId v = freshVar("gst");
      VarId w = rng.pick(th->varPool());
      return checkTheorem(*th, kernel::axGhost(*th, v, w, fml(2)));
    }
    if (schema == "identity-eq") {
      VarId v = rng.pick(th->varPool());
      return checkTheorem(*th, kernel::axIdentityEq(*th, v));
    }
    return std::nullopt;
  });
}

}  // namespace dynth
