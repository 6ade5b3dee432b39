// Combination of two dynamic theories over product states. World atoms and
// programs act on their own component and leave the other untouched;
// user-declared coupling atoms relate values across the worlds. The fully
// heterogeneous theory is the havoc + regular closure of the combination.

#ifndef DYNTH_HETERO_HPP_
#define DYNTH_HETERO_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dynth/theory.hpp"

namespace dynth {

struct HeteroAtom {
  std::string name;          // printable head, e.g. "eq" or "scaled_eq"
  std::vector<VarId> args;   // combined-level (prefixed, world-tagged)
  Value scale = 1;           // scaled_eq factor
  VarSetBase declaredFv;
  std::function<bool(const State&)> predicate;

  // Structural identity ignores the predicate closure.
  bool operator==(const HeteroAtom& o) const {
    return name == o.name && args == o.args && scale == o.scale;
  }
};

// value(v0) = value(v1); v0 must be world-tagged 0, v1 world-tagged 1.
HeteroAtom couplingEq(VarId v0, VarId v1);
// value(v0) = k * value(v1), k != 0.
HeteroAtom couplingScaledEq(VarId v0, VarId v1, Value k);

// Atom payloads of the combined theory.
struct WorldAtomP {
  int world;
  Atom inner;
  bool operator==(const WorldAtomP& o) const {
    return world == o.world && inner.structurallyEqual(o.inner);
  }
};
struct CouplingAtomP {
  int index;
  bool operator==(const CouplingAtomP& o) const { return index == o.index; }
};
struct WorldProgP {
  int world;
  Program inner;
  bool operator==(const WorldProgP& o) const {
    return world == o.world && inner.structurallyEqual(o.inner);
  }
};

class CombinedTheory final : public Theory {
 public:
  CombinedTheory(TheoryPtr w0, TheoryPtr w1, std::vector<HeteroAtom> couplings,
                 std::string prefix0, std::string prefix1);

  std::string describe() const override;
  Kind kind() const override { return Kind::Combined; }
  const Theory* world(int i) const override {
    return i == 0 ? w0_.get() : i == 1 ? w1_.get() : nullptr;
  }
  const std::string& prefix(int i) const { return i == 0 ? p0_ : p1_; }
  const std::vector<HeteroAtom>& couplings() const { return couplings_; }

  // Prefixed, world-tagged view of a world variable.
  VarId prefixVar(int i, VarId nativeVar) const;
  VarId nativeVar(VarId combinedVar) const;  // inverse
  int varWorldOf(VarId v) const;             // -1 if not owned

  State projectWorld(int i, const State& s) const;
  State injectWorld(int i, const State& s, const State& nativeComponent) const;

  Atom wrapWorldAtom(int i, Atom nativeAtom) const;
  Program wrapWorldProgram(int i, Program nativeProgram) const;
  Atom couplingAtom(int index) const;
  int couplingIndexOf(const HeteroAtom& a) const;  // -1 if undeclared

  // Theory interface ---------------------------------------------------------
  bool ownsAtom(const Atom& a) const override;
  bool ownsProgram(const Program& p) const override;
  bool ownsVar(VarId v) const override;
  std::vector<VarId> varPool() const override;
  VarId internVar(const std::string& name) const override;
  Value defaultValue() const override { return w0_->defaultValue(); }
  bool finiteEnumerable() const override;
  std::vector<State> enumerateStates() const override;
  std::vector<Value> valueWindow(VarId v, const EvalBudget& b) const override;
  bool windowExhaustive(VarId v, const EvalBudget& b) const override;
  bool atomEval(const State& s, const Atom& a) const override;
  VarSetBase atomFv(const Atom& a) const override;
  SuccessorSet progSucc(const State& s, const Program& p,
                        const EvalBudget& b) const override;
  VarSetBase progFv(const Program& p) const override;
  VarSetBase progBv(const Program& p) const override;
  bool renamable() const override;
  std::optional<Atom> renameAtomVar(const Atom& a, VarId from,
                                    VarId to) const override;
  std::optional<Program> renameProgramVar(const Program& p, VarId from,
                                          VarId to) const override;
  std::optional<Formula> eqPredicate(VarId v, VarId w) const override;
  std::shared_ptr<const InductiveExpressivity> inductive() const override;
  std::optional<Formula> verum() const override;
  State sampleState(Rng& rng, const EvalBudget& b) const override;
  Atom sampleAtom(Rng& rng) const override;
  Program sampleProgram(Rng& rng, int depth) const override;
  void printAtomMapped(std::ostream& os, const Atom& a,
                       const IdentMapper& m) const override;
  void printProgramMapped(std::ostream& os, const Program& p,
                          const IdentMapper& m) const override;
  void printValue(std::ostream& os, VarId v, Value val) const override;
  Formula parseAtomicFormula(Lexer& lx) const override;
  Program parseProgram(Lexer& lx) const override;

 private:
  EvalBudget worldBudget(int i, const EvalBudget& b) const;
  IdentMapper composeMapper(int i, const IdentMapper& outer) const;

  TheoryPtr w0_, w1_;
  std::vector<HeteroAtom> couplings_;
  std::string p0_, p1_;
};

// Simple heterogeneous theory over product states (Def 6.3/6.4 shape).
TheoryPtr combine(TheoryPtr t0, TheoryPtr t1, std::vector<HeteroAtom> couplings,
                  std::string prefix0 = "c.", std::string prefix1 = "p.");

// regular(havoc(combine(...))) — supports regular programs mixing both
// worlds' programs inside one modality.
TheoryPtr fullHetero(TheoryPtr t0, TheoryPtr t1,
                     std::vector<HeteroAtom> couplings,
                     std::string prefix0 = "c.", std::string prefix1 = "p.");

// Peels lift layers down to the combined theory; nullptr when `th` is not
// built over a combination.
const CombinedTheory* combinedOf(const Theory& th);

// Maps a pure world-i formula into a theory built over the combination
// (prefixes variables, wraps atoms and programs). Evaluation agrees with
// the world theory on projected states.
Formula embedWorldFormula(const Theory& th, int i, const Formula& worldFormula);
Program embedWorldProgram(const Theory& th, int i, const Program& worldProgram);

// Syntactic world-purity checks used by the reduction and frame rules.
// They name the first foreign symbol found via `offender`.
bool formulaPureWorld(const Theory& th, const Formula& f, int i,
                      std::string* offender = nullptr);
bool programPureWorld(const Theory& th, const Program& p, int i,
                      std::string* offender = nullptr);

// Counting-formula builders over the chosen side's variables, valid in the
// combined theory.
std::shared_ptr<const InductiveExpressivity> heteroInductiveInstance(
    int side, const Theory& th);

}  // namespace dynth

#endif  // DYNTH_HETERO_HPP_
