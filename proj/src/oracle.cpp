#include "dynth/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dynth/hetero.hpp"
#include "dynth/instance_calculus.hpp"
#include "dynth/kernel.hpp"
#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"

namespace dynth {

// --- falsification ---------------------------------------------------------------

namespace {

// Candidate states for counterexample search: the full state space on
// finite theories, otherwise assignments of the formula's free variables
// over the budget window (plus the canonical initial state).
std::vector<State> candidateStates(const Theory& th, const Formula& f,
                                   const EvalBudget& b) {
  if (th.finiteEnumerable()) return th.enumerateStates();
  std::vector<State> states{th.initialState()};
  std::vector<VarId> fv = fvSyn(th, f).items();
  for (VarId v : fv) {
    std::vector<State> next;
    auto window = th.valueWindow(v, b);
    for (const State& s : states) {
      for (Value val : window) {
        next.push_back(s.with(v, val));
        if (next.size() > b.productCap) break;
      }
      if (next.size() > b.productCap) break;
    }
    states = std::move(next);
    if (states.size() >= b.productCap) break;
  }
  return states;
}

}  // namespace

std::vector<std::string> explainFalse(const Theory& th, const State& s,
                                      const Formula& f, const EvalBudget& b) {
  std::vector<std::string> trace;
  State cur = s;
  Formula g = f;
  for (;;) {
    if (evalFormula(th, cur, g, b) != Verdict::False) {
      trace.push_back("(subformula no longer false; trace ends)");
      return trace;
    }
    switch (g.kind()) {
      case Formula::Kind::Atom: {
        std::ostringstream os;
        os << "atom '";
        th.printAtom(os, g.atomPayload());
        os << "' is false at " << cur.str();
        trace.push_back(os.str());
        return trace;
      }
      case Formula::Kind::Not: {
        trace.push_back("negation of: " + printFormula(g.child(), th) +
                        " (which holds)");
        return trace;
      }
      case Formula::Kind::And: {
        Verdict l = evalFormula(th, cur, g.left(), b);
        if (l == Verdict::False) {
          trace.push_back("left conjunct fails");
          g = g.left();
        } else {
          trace.push_back("right conjunct fails");
          g = g.right();
        }
        break;
      }
      case Formula::Kind::Forall: {
        VarId v = g.boundVar();
        bool found = false;
        for (Value val : th.valueWindow(v, b)) {
          State inst = cur.with(v, val);
          if (evalFormula(th, inst, g.child(), b) == Verdict::False) {
            std::ostringstream os;
            os << "forall " << v.name() << ": instance " << v.name() << " = ";
            th.printValue(os, v, val);
            os << " fails";
            trace.push_back(os.str());
            cur = inst;
            g = g.child();
            found = true;
            break;
          }
        }
        if (!found) {
          trace.push_back("(quantifier witness outside window)");
          return trace;
        }
        break;
      }
      case Formula::Kind::Box: {
        SuccessorSet succ = th.progSucc(cur, g.program(), b);
        bool found = false;
        for (const State& t : succ.states) {
          if (evalFormula(th, t, g.child(), b) == Verdict::False) {
            std::ostringstream os;
            os << "box [" << printProgram(g.program(), th) << "]: successor "
               << t.str() << " fails";
            trace.push_back(os.str());
            cur = t;
            g = g.child();
            found = true;
            break;
          }
        }
        if (!found) {
          trace.push_back("(successor witness outside budget)");
          return trace;
        }
        break;
      }
    }
  }
}

std::optional<CounterExample> falsify(const Theory& th, const Formula& f,
                                      const EvalBudget& b) {
  checkWellFormed(th, f);
  std::vector<State> candidates = candidateStates(th, f, b);
  int n = static_cast<int>(candidates.size());
  int foundIdx = n;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(min : foundIdx)
#endif
  for (int i = 0; i < n; ++i) {
    if (evalFormula(th, candidates[i], f, b) == Verdict::False)
      foundIdx = std::min(foundIdx, i);
  }
  if (foundIdx == n) return std::nullopt;
  State witness = candidates[foundIdx];

  // Greedy budget shrinking: halve the window and the star depth while the
  // witness still refutes the formula.
  EvalBudget shrunk = b;
  for (;;) {
    EvalBudget smaller = shrunk;
    smaller.window = {shrunk.window.lo / 2, shrunk.window.hi / 2};
    if (smaller.window.lo == shrunk.window.lo &&
        smaller.window.hi == shrunk.window.hi)
      break;
    if (evalFormula(th, witness, f, smaller) == Verdict::False)
      shrunk = smaller;
    else
      break;
  }
  while (shrunk.starDepth > 1) {
    EvalBudget smaller = shrunk;
    smaller.starDepth = shrunk.starDepth / 2;
    if (evalFormula(th, witness, f, smaller) == Verdict::False)
      shrunk = smaller;
    else
      break;
  }
  CounterExample ce{witness, explainFalse(th, witness, f, shrunk), shrunk};
  return ce;
}

// --- trial runner ------------------------------------------------------------------

TrialBatch runTrials(int n,
                     const std::function<std::optional<std::string>(int)>& trial,
                     bool parallel) {
  std::vector<std::unique_ptr<std::string>> slots(n);
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (int i = 0; i < n; ++i) {
      auto w = trial(i);
      if (w) slots[i] = std::make_unique<std::string>(std::move(*w));
    }
  } else {
    for (int i = 0; i < n; ++i) {
      auto w = trial(i);
      if (w) slots[i] = std::make_unique<std::string>(std::move(*w));
    }
  }
  TrialBatch batch;
  batch.trials = n;
  for (int i = 0; i < n; ++i)
    if (slots[i]) {
      ++batch.failures;
      if (batch.witnesses.size() < 16) batch.witnesses.emplace_back(i, *slots[i]);
    }
  return batch;
}

// --- report ------------------------------------------------------------------------

bool AuditReport::ok() const { return totalFailures() == 0; }

int AuditReport::totalFailures() const {
  int n = 0;
  for (const auto& r : results) n += r.failures;
  return n;
}

std::string AuditReport::str() const {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.failures == 0 ? "pass" : "FAIL") << "  " << r.name << "  ("
       << r.trials << " trials";
    if (r.failures) os << ", " << r.failures << " failures";
    os << ")\n";
    for (const auto& w : r.witnesses) os << "      witness: " << w << "\n";
  }
  return os.str();
}

std::string AuditReport::machineSummary() const {
  std::ostringstream os;
  for (const auto& r : results)
    os << "SUMMARY schema=" << r.name << " trials=" << r.trials
       << " failures=" << r.failures << " seed=" << r.seed
       << " elapsed_ms=" << static_cast<long>(r.elapsedMs) << "\n";
  return os.str();
}

// --- generators ----------------------------------------------------------------------

KripkeModel randomKripkeModel(Rng& rng, int maxStates, int maxPrograms,
                              int maxAtoms) {
  KripkeModel m;
  int nStates = static_cast<int>(rng.range(1, maxStates));
  for (int i = 0; i < nStates; ++i) m.states.push_back("s" + std::to_string(i));
  int nProgs = static_cast<int>(rng.range(1, maxPrograms));
  const char* progNames[] = {"a", "b", "g"};
  for (int i = 0; i < nProgs; ++i) {
    std::vector<std::pair<int, int>> rel;
    for (int from = 0; from < nStates; ++from)
      for (int to = 0; to < nStates; ++to)
        if (rng.chance(0.3)) rel.emplace_back(from, to);
    m.programs.emplace_back(progNames[i], std::move(rel));
  }
  int nAtoms = static_cast<int>(rng.range(1, maxAtoms));
  const char* atomNames[] = {"q", "r", "t"};
  for (int i = 0; i < nAtoms; ++i) {
    std::vector<int> set;
    for (int s = 0; s < nStates; ++s)
      if (rng.chance(0.5)) set.push_back(s);
    m.atoms.emplace_back(atomNames[i], std::move(set));
  }
  return m;
}

Formula randomFormula(const Theory& th, Rng& rng, int depth,
                      bool modalityFree) {
  if (depth <= 0 || rng.chance(0.35)) {
    Formula f = Formula::atom(th.sampleAtom(rng));
    return f;
  }
  switch (rng.range(0, modalityFree ? 5 : 7)) {
    case 0:
      return Formula::mkNot(randomFormula(th, rng, depth - 1, modalityFree));
    case 1:
      return Formula::mkAnd(randomFormula(th, rng, depth - 1, modalityFree),
                            randomFormula(th, rng, depth - 1, modalityFree));
    case 2:
      return Formula::mkOr(randomFormula(th, rng, depth - 1, modalityFree),
                           randomFormula(th, rng, depth - 1, modalityFree));
    case 3:
      return Formula::implies(randomFormula(th, rng, depth - 1, modalityFree),
                              randomFormula(th, rng, depth - 1, modalityFree));
    case 4:
      return Formula::forall(rng.pick(th.varPool()),
                             randomFormula(th, rng, depth - 1, modalityFree));
    case 5:
      return Formula::exists(rng.pick(th.varPool()),
                             randomFormula(th, rng, depth - 1, modalityFree));
    case 6:
      return Formula::box(th.sampleProgram(rng, depth - 1),
                          randomFormula(th, rng, depth - 1, modalityFree));
    default:
      return Formula::diamond(th.sampleProgram(rng, depth - 1),
                              randomFormula(th, rng, depth - 1, modalityFree));
  }
}

// --- corrupted declarations ------------------------------------------------------------

namespace {

// Forwards everything to the base theory; subclasses override one
// declaration to corrupt it.
class ForwardingTheory : public Theory {
 public:
  explicit ForwardingTheory(TheoryPtr base) : base_(std::move(base)) {}
  std::string describe() const override { return base_->describe(); }
  Kind kind() const override { return base_->kind(); }
  const Theory* base() const override { return base_->base(); }
  const Theory* world(int i) const override { return base_->world(i); }
  bool ownsAtom(const Atom& a) const override { return base_->ownsAtom(a); }
  bool ownsProgram(const Program& p) const override {
    return base_->ownsProgram(p);
  }
  bool ownsVar(VarId v) const override { return base_->ownsVar(v); }
  std::vector<VarId> varPool() const override { return base_->varPool(); }
  VarId internVar(const std::string& n) const override {
    return base_->internVar(n);
  }
  Value defaultValue() const override { return base_->defaultValue(); }
  bool finiteEnumerable() const override { return base_->finiteEnumerable(); }
  std::vector<State> enumerateStates() const override {
    return base_->enumerateStates();
  }
  std::vector<Value> valueWindow(VarId v, const EvalBudget& b) const override {
    return base_->valueWindow(v, b);
  }
  bool windowExhaustive(VarId v, const EvalBudget& b) const override {
    return base_->windowExhaustive(v, b);
  }
  bool atomEval(const State& s, const Atom& a) const override {
    return base_->atomEval(s, a);
  }
  VarSetBase atomFv(const Atom& a) const override { return base_->atomFv(a); }
  SuccessorSet progSucc(const State& s, const Program& p,
                        const EvalBudget& b) const override {
    return base_->progSucc(s, p, b);
  }
  VarSetBase progFv(const Program& p) const override {
    return base_->progFv(p);
  }
  VarSetBase progBv(const Program& p) const override {
    return base_->progBv(p);
  }
  State sampleState(Rng& rng, const EvalBudget& b) const override {
    return base_->sampleState(rng, b);
  }
  Atom sampleAtom(Rng& rng) const override { return base_->sampleAtom(rng); }
  Program sampleProgram(Rng& rng, int depth) const override {
    return base_->sampleProgram(rng, depth);
  }
  void printAtomMapped(std::ostream& os, const Atom& a,
                       const IdentMapper& m) const override {
    base_->printAtomMapped(os, a, m);
  }
  void printProgramMapped(std::ostream& os, const Program& p,
                          const IdentMapper& m) const override {
    base_->printProgramMapped(os, p, m);
  }
  void printValue(std::ostream& os, VarId v, Value val) const override {
    base_->printValue(os, v, val);
  }
  Formula parseAtomicFormula(Lexer& lx) const override {
    return base_->parseAtomicFormula(lx);
  }
  Program parseProgram(Lexer& lx) const override {
    return base_->parseProgram(lx);
  }

 protected:
  TheoryPtr base_;
};

struct CorruptAtomFv final : ForwardingTheory {
  using ForwardingTheory::ForwardingTheory;
  VarSetBase atomFv(const Atom&) const override { return {}; }
};
struct CorruptProgFv final : ForwardingTheory {
  using ForwardingTheory::ForwardingTheory;
  VarSetBase progFv(const Program&) const override { return {}; }
};
struct CorruptProgBv final : ForwardingTheory {
  using ForwardingTheory::ForwardingTheory;
  VarSetBase progBv(const Program&) const override { return {}; }
};

}  // namespace

TheoryPtr corruptAtomFv(TheoryPtr base) {
  return std::make_shared<CorruptAtomFv>(std::move(base));
}
TheoryPtr corruptProgFv(TheoryPtr base) {
  return std::make_shared<CorruptProgFv>(std::move(base));
}
TheoryPtr corruptProgBv(TheoryPtr base) {
  return std::make_shared<CorruptProgBv>(std::move(base));
}

// --- lemma suites -------------------------------------------------------------------

namespace {

double msSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

State scrambleOutside(const Theory& th, const State& s, const VarSetBase& keep,
                      Rng& rng, const EvalBudget& b) {
  State r = s;
  for (VarId v : th.varPool()) {
    if (keep.contains(v)) continue;
    auto win = th.valueWindow(v, b);
    if (!win.empty()) r.set(v, win[rng.next() % win.size()]);
  }
  return r;
}

}  // namespace

AuditReport testCoincidence(const TheoryPtr& th, int trials, std::uint64_t seed,
                            bool parallel) {
  AuditReport rep;
  EvalBudget budget = EvalBudget::withWindow(-5, 5);
  budget.starDepth = 6;

  auto t0 = std::chrono::steady_clock::now();
  // Lemma: formulas have equal truth at states agreeing on fvSyn.
  TrialBatch fml = runTrials(
      trials,
      [&](int i) -> std::optional<std::string> {
        Rng rng(mixSeed(seed, i));
        Formula f = randomFormula(*th, rng, 3);
        VarSetBase fv = fvSyn(*th, f);
        State mu = th->sampleState(rng, budget);
        State nu = scrambleOutside(*th, mu, fv, rng, budget);
        Verdict a = evalFormula(*th, mu, f, budget);
        Verdict c = evalFormula(*th, nu, f, budget);
        if (a != c)
          return "formula " + printFormula(f, *th) + " differs: " + mu.str() +
                 " vs " + nu.str();
        return std::nullopt;
      },
      parallel);
  AuditResult r1{"coincidence-formulas (" + th->describe() + ")", fml.trials,
                 fml.failures, seed, msSince(t0), {}};
  for (auto& [i, w] : fml.witnesses)
    r1.witnesses.push_back("trial " + std::to_string(i) + ": " + w);
  rep.results.push_back(std::move(r1));

  t0 = std::chrono::steady_clock::now();
  // Lemma: programs started in states agreeing on V >= fv(p) have matching
  // runs agreeing on V.
  TrialBatch prog = runTrials(
      trials,
      [&](int i) -> std::optional<std::string> {
        Rng rng(mixSeed(seed ^ 0x5eed, i));
        Program p = th->sampleProgram(rng, 2);
        VarSetBase v = th->progFv(p);
        for (VarId x : th->varPool())
          if (rng.chance(0.3)) v.insert(x);
        State mu = th->sampleState(rng, budget);
        State nu = scrambleOutside(*th, mu, v, rng, budget);
        auto sMu = th->progSucc(mu, p, budget);
        auto sNu = th->progSucc(nu, p, budget);
        if (sNu.truncated) return std::nullopt;
        for (const State& omega : sMu.states) {
          bool matched = false;
          for (const State& omega2 : sNu.states)
            if (omega.equalOn(omega2, v)) {
              matched = true;
              break;
            }
          if (!matched)
            return "program " + printProgram(p, *th) + ": successor " +
                   omega.str() + " of " + mu.str() + " unmatched from " +
                   nu.str();
        }
        return std::nullopt;
      },
      parallel);
  AuditResult r2{"coincidence-programs (" + th->describe() + ")", prog.trials,
                 prog.failures, seed, msSince(t0), {}};
  for (auto& [i, w] : prog.witnesses)
    r2.witnesses.push_back("trial " + std::to_string(i) + ": " + w);
  rep.results.push_back(std::move(r2));
  return rep;
}

AuditReport testBoundedEffect(const TheoryPtr& th, int trials,
                              std::uint64_t seed, bool parallel) {
  AuditReport rep;
  EvalBudget budget = EvalBudget::withWindow(-5, 5);
  budget.starDepth = 6;
  auto t0 = std::chrono::steady_clock::now();
  TrialBatch batch = runTrials(
      trials,
      [&](int i) -> std::optional<std::string> {
        Rng rng(mixSeed(seed ^ 0xb0ef, i));
        Program p = th->sampleProgram(rng, 2);
        VarSetBase bv = th->progBv(p);
        State mu = th->sampleState(rng, budget);
        for (const State& nu : th->progSucc(mu, p, budget).states)
          if (!mu.equalOnComplement(nu, bv))
            return "program " + printProgram(p, *th) + " bv=" + bv.str() +
                   " transition " + mu.str() + " -> " + nu.str() +
                   " writes outside bv";
        return std::nullopt;
      },
      parallel);
  AuditResult r{"bounded-effect (" + th->describe() + ")", batch.trials,
                batch.failures, seed, msSince(t0), {}};
  for (auto& [i, w] : batch.witnesses)
    r.witnesses.push_back("trial " + std::to_string(i) + ": " + w);
  rep.results.push_back(std::move(r));
  return rep;
}

AuditReport auditTheoryLaws(const TheoryPtr& th, int trials,
                            std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  LawReport law = checkTheoryLaws(*th, trials, seed);
  AuditResult r{"theory-laws (" + th->describe() + ")", trials,
                static_cast<int>(law.failures.size()), seed, msSince(t0), {}};
  for (const auto& f : law.failures)
    r.witnesses.push_back("[" + f.law + "] " + f.detail);
  AuditReport rep;
  rep.results.push_back(std::move(r));
  return rep;
}

// --- axiom schema audit -----------------------------------------------------------

// Implemented in oracle_schemas.cpp.
std::optional<std::string> axiomSchemaTrial(const std::string& schema,
                                            std::uint64_t seed, int trial);

const std::vector<std::string>& axiomSchemaNames() {
  static const std::vector<std::string> names = {
      "G",   "K",     "V",     "B",    "havoc", "test", "seq",
      "choice", "star", "I",     "C",    "boxAnd", "KDia", "MPDia",
      "M",   "MR",    "PB",    "ind",  "Fi",    "ghost", "identity-eq"};
  return names;
}

AuditReport validateAxiomSchemas(int trials, std::uint64_t seed, bool parallel) {
  AuditReport rep;
  for (const std::string& schema : axiomSchemaNames()) {
    auto t0 = std::chrono::steady_clock::now();
    TrialBatch batch = runTrials(
        trials,
        [&, schema](int i) -> std::optional<std::string> {
          return axiomSchemaTrial(schema, seed, i);
        },
        parallel);
    AuditResult r{schema, batch.trials, batch.failures, seed, msSince(t0), {}};
    for (auto& [i, w] : batch.witnesses)
      r.witnesses.push_back("trial " + std::to_string(i) + ": " + w);
    rep.results.push_back(std::move(r));
  }
  return rep;
}

}  // namespace dynth
