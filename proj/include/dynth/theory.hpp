// Dynamic theories: a signature (variables, atoms, programs) plus a domain
// of computation (state space, evaluators, fv/bv overapproximations and
// optional capabilities). Everything a theory exposes here is a pure
// function of its inputs; handles are immutable and safe to share across
// threads.

#ifndef DYNTH_THEORY_HPP_
#define DYNTH_THEORY_HPP_

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynth/formula.hpp"
#include "dynth/state.hpp"
#include "dynth/symbols.hpp"

namespace dynth {

class Lexer;

struct TheoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Window {
  Value lo = -100;
  Value hi = 100;
  Value size() const { return hi - lo + 1; }
};

// Evaluation budget for the brute-force paths: quantifier windows,
// star-unrolling depth and stream caps. Finite-enumerable theories ignore
// the window and enumerate exactly.
struct EvalBudget {
  Window window{-100, 100};
  std::optional<Window> window0, window1;  // per-world, combined theories
  int quantCap = 201;
  int starDepth = 30;
  std::size_t succCap = 200000;
  std::size_t productCap = 1000000;

  static EvalBudget withWindow(Value lo, Value hi) {
    EvalBudget b;
    b.window = {lo, hi};
    return b;
  }
};

enum class Verdict : std::uint8_t { False = 0, True = 1, Unknown = 2 };

inline Verdict verdictNot(Verdict v) {
  if (v == Verdict::Unknown) return v;
  return v == Verdict::True ? Verdict::False : Verdict::True;
}
inline Verdict verdictAnd(Verdict a, Verdict b) {
  if (a == Verdict::False || b == Verdict::False) return Verdict::False;
  if (a == Verdict::True && b == Verdict::True) return Verdict::True;
  return Verdict::Unknown;
}
const char* verdictName(Verdict v);

struct SuccessorSet {
  std::vector<State> states;
  bool truncated = false;  // enumeration was cut short by the budget
};

// Deterministic RNG; every audit trial derives its own stream from the
// run seed so reports do not depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  // uniform in [lo, hi]
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(
                                                       hi - lo + 1));
  }
  bool chance(double p) { return next() % 1024 < p * 1024; }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[next() % xs.size()];
  }

 private:
  std::mt19937_64 eng_;
};

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream);

// Formula builders for counting over designated variables (the fuel for
// the loop convergence axiom). `u2n` is the test-only abstraction map.
struct InductiveExpressivity {
  std::vector<VarId> countingPool;  // sample of usable counting variables
  std::function<bool(VarId)> isCountingVar;
  std::function<Formula(VarId)> natGt0;
  std::function<Formula(VarId, VarId)> natEq;
  std::function<Formula(VarId, VarId)> natPlus1;
  std::function<std::uint64_t(Value)> u2n;
};

class Theory : public std::enable_shared_from_this<Theory> {
 public:
  enum class Kind { Instance, HavocLift, RegularLift, Combined };

  Theory();
  virtual ~Theory() = default;

  TheoryId id() const { return id_; }
  virtual std::string describe() const = 0;
  virtual Kind kind() const { return Kind::Instance; }
  virtual const Theory* base() const { return nullptr; }    // lifts
  virtual const Theory* world(int) const { return nullptr; }  // combined

  // --- signature ---------------------------------------------------------
  virtual bool ownsAtom(const Atom& a) const = 0;
  virtual bool ownsProgram(const Program& p) const = 0;
  virtual bool ownsVar(VarId v) const = 0;
  // Finite pool of variables used by samplers and state enumeration.
  virtual std::vector<VarId> varPool() const = 0;
  // Resolves a surface identifier to this theory's variable (combined
  // theories attach world tags here).
  virtual VarId internVar(const std::string& name) const {
    return VarId::intern(name);
  }

  // --- domain of computation ---------------------------------------------
  virtual Value defaultValue() const { return 0; }
  State initialState() const { return State(defaultValue()); }
  virtual bool finiteEnumerable() const = 0;
  // All states of a finite-enumerable theory.
  virtual std::vector<State> enumerateStates() const;
  // Admissible values of `v` under the budget; exact on finite theories.
  virtual std::vector<Value> valueWindow(VarId v, const EvalBudget& b) const = 0;
  virtual bool windowExhaustive(VarId v, const EvalBudget& b) const = 0;
  Value varEval(const State& s, VarId v) const { return s.get(v); }
  virtual bool atomEval(const State& s, const Atom& a) const = 0;
  virtual VarSetBase atomFv(const Atom& a) const = 0;
  virtual SuccessorSet progSucc(const State& s, const Program& p,
                                const EvalBudget& b) const = 0;
  virtual VarSetBase progFv(const Program& p) const = 0;
  virtual VarSetBase progBv(const Program& p) const = 0;

  // --- capabilities -------------------------------------------------------
  virtual bool renamable() const { return false; }
  virtual std::optional<Atom> renameAtomVar(const Atom&, VarId, VarId) const {
    return std::nullopt;
  }
  virtual std::optional<Program> renameProgramVar(const Program&, VarId,
                                                  VarId) const {
    return std::nullopt;
  }
  // v =. w as a modality-free formula, for twin variables.
  virtual std::optional<Formula> eqPredicate(VarId, VarId) const {
    return std::nullopt;
  }
  virtual std::shared_ptr<const InductiveExpressivity> inductive() const {
    return nullptr;
  }
  // Lift-provided program constructors (nullopt when unsupported).
  virtual std::optional<Program> havocProgram(VarId) const {
    return std::nullopt;
  }
  virtual bool regularLifted() const { return false; }
  virtual std::optional<Program> embedProgramFromBase(const Program&) const {
    return std::nullopt;
  }
  // A canonical valid modality-free formula, when the theory has one.
  virtual std::optional<Formula> verum() const { return std::nullopt; }

  // --- sampling (audits and generators) -----------------------------------
  virtual State sampleState(Rng& rng, const EvalBudget& b) const;
  virtual Atom sampleAtom(Rng& rng) const = 0;
  virtual Program sampleProgram(Rng& rng, int depth) const = 0;

  // --- text ----------------------------------------------------------------
  // Identifier mapper applied while printing (combined theories prefix the
  // constituent worlds' names through it). Empty function = identity.
  using IdentMapper = std::function<std::string(const std::string&)>;
  virtual void printAtomMapped(std::ostream& os, const Atom& a,
                               const IdentMapper& m) const = 0;
  virtual void printProgramMapped(std::ostream& os, const Program& p,
                                  const IdentMapper& m) const = 0;
  void printAtom(std::ostream& os, const Atom& a) const {
    printAtomMapped(os, a, {});
  }
  void printProgram(std::ostream& os, const Program& p) const {
    printProgramMapped(os, p, {});
  }
  virtual void printValue(std::ostream& os, VarId v, Value val) const;
  // Parses one atomic formula in this theory's atom grammar (comparison
  // macros may expand to a small connective tree).
  virtual Formula parseAtomicFormula(Lexer& lx) const = 0;
  virtual Program parseProgram(Lexer& lx) const = 0;

 private:
  TheoryId id_;
};

using TheoryPtr = std::shared_ptr<const Theory>;

// --- theory-core operations ------------------------------------------------

// Budget-bounded evaluation of a formula at a state (Def: formula
// semantics). True/False verdicts are sound; Unknown records that a
// quantifier window or successor stream was truncated.
Verdict evalFormula(const Theory& th, const State& s, const Formula& f,
                    const EvalBudget& b);

// mu =_V nu, for finite V or complements of finite sets.
bool equalOn(const Theory& th, const State& mu, const State& nu,
             const VarSet& vars);

// Syntactic free variables: a finite superset of the semantic ones.
VarSetBase fvSyn(const Theory& th, const Formula& f);

// Throws TheoryError if `f` uses atoms/programs from a foreign signature.
void checkWellFormed(const Theory& th, const Formula& f);

// Decides validity by enumerating the full state space (finite theories).
bool isValidExhaustive(const Theory& th, const Formula& f);

// --- randomized law audit ----------------------------------------------------

struct LawFailure {
  std::string law;
  std::string detail;  // witnessing states / atom / program
};

struct LawReport {
  int trials = 0;
  int interpolationChecks = 0, atomFvChecks = 0, extensionalityChecks = 0,
      progFvChecks = 0, boundedEffectChecks = 0;
  std::vector<LawFailure> failures;
  bool ok() const { return failures.empty(); }
  std::string str() const;
};

// Randomized audit of the theory laws: interpolation, atom-fv coincidence,
// program extensionality, program-fv coincidence transfer and bv bounded
// effect.
LawReport checkTheoryLaws(const Theory& th, int trials, std::uint64_t seed,
                          const EvalBudget& b = EvalBudget::withWindow(-5, 5));

}  // namespace dynth

#endif  // DYNTH_THEORY_HPP_
