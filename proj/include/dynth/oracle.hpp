// Brute-force semantic oracle: exhaustive validity on finite theories,
// bounded counterexample search elsewhere, and the randomized law/axiom
// audit suites. Trial batches fan out to OpenMP workers; a serial
// reference runner is kept and both merge reports by trial index, so the
// output is identical either way.

#ifndef DYNTH_ORACLE_HPP_
#define DYNTH_ORACLE_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dynth/instances.hpp"
#include "dynth/theory.hpp"

namespace dynth {

struct CounterExample {
  State state;
  std::vector<std::string> trace;  // falsified subformula path
  EvalBudget budget;               // budget that reproduces the refutation
};

// Bounded counterexample search. A result is a genuine refutation of
// validity; std::nullopt means "screened" (no counterexample within the
// budget), which is not a validity proof on infinite theories. Found
// counterexamples are shrunk greedily over windows and star depth.
std::optional<CounterExample> falsify(const Theory& th, const Formula& f,
                                      const EvalBudget& b);

// Falsification trace for a state known to refute f.
std::vector<std::string> explainFalse(const Theory& th, const State& s,
                                      const Formula& f, const EvalBudget& b);

// --- trial runner (OpenMP kernels with serial reference) ----------------------

struct TrialBatch {
  int trials = 0;
  int failures = 0;
  std::vector<std::pair<int, std::string>> witnesses;  // by trial index
};

// Runs `n` independent trials. `parallel` selects the OpenMP path; the
// serial path is the reference implementation used by the equivalence
// tests. Trials must be pure functions of their index.
TrialBatch runTrials(int n,
                     const std::function<std::optional<std::string>(int)>& trial,
                     bool parallel);

// --- audit suites ----------------------------------------------------------------

struct AuditResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::uint64_t seed = 0;
  double elapsedMs = 0;
  std::vector<std::string> witnesses;
};

struct AuditReport {
  std::vector<AuditResult> results;
  bool ok() const;
  int totalFailures() const;
  std::string str() const;             // line-oriented text
  std::string machineSummary() const;  // SUMMARY lines
};

// Names of the audited schemas (Fig. 1, regular-program axioms, havoc, C,
// and the derived rules).
const std::vector<std::string>& axiomSchemaNames();

// Randomized soundness audit of every axiom/rule schema against random
// finite Kripke theories (exhaustive validity) and windowed semiring
// theories (screening).
AuditReport validateAxiomSchemas(int trials, std::uint64_t seed,
                                 bool parallel = true);

// Randomized coincidence (formula + program) and bounded-effect suites.
AuditReport testCoincidence(const TheoryPtr& th, int trials, std::uint64_t seed,
                            bool parallel = true);
AuditReport testBoundedEffect(const TheoryPtr& th, int trials,
                              std::uint64_t seed, bool parallel = true);
// The theory-law audit (interpolation, fv/bv laws) packaged as a report.
AuditReport auditTheoryLaws(const TheoryPtr& th, int trials,
                            std::uint64_t seed);

// --- negative controls ---------------------------------------------------------

// Wrappers with deliberately corrupted declarations; the law and lemma
// suites must produce witnessed failures on them.
TheoryPtr corruptAtomFv(TheoryPtr base);   // declares empty atom fv sets
TheoryPtr corruptProgFv(TheoryPtr base);   // declares empty program fv sets
TheoryPtr corruptProgBv(TheoryPtr base);   // declares empty program bv sets

// --- random generators -----------------------------------------------------------

KripkeModel randomKripkeModel(Rng& rng, int maxStates = 5, int maxPrograms = 2,
                              int maxAtoms = 3);
Formula randomFormula(const Theory& th, Rng& rng, int depth,
                      bool modalityFree = false);

}  // namespace dynth

#endif  // DYNTH_ORACLE_HPP_
