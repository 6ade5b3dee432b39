// Concrete dynamic theories: first-order DL over an ordered semiring
// (int or nat carriers, assignment programs) and PDL over finite Kripke
// frames, plus their instance-level calculus helpers.

#ifndef DYNTH_INSTANCES_HPP_
#define DYNTH_INSTANCES_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dynth/theory.hpp"

namespace dynth {

// --- semiring terms ----------------------------------------------------------

struct SemiringTerm;
using TermPtr = std::shared_ptr<const SemiringTerm>;

struct SemiringTerm {
  enum class Tag : std::uint8_t { Lit, Var, Add, Mul };
  Tag tag = Tag::Lit;
  Value lit = 0;
  VarId var;
  TermPtr a, b;
};

TermPtr termLit(Value v);
TermPtr termVar(VarId v);
TermPtr termAdd(TermPtr a, TermPtr b);
TermPtr termMul(TermPtr a, TermPtr b);
bool termEqual(const TermPtr& a, const TermPtr& b);
Value termEval(const SemiringTerm& t, const State& s);
VarSetBase termFv(const SemiringTerm& t);
TermPtr termRename(const TermPtr& t, VarId from, VarId to);
TermPtr termSubst(const TermPtr& t, VarId v, const TermPtr& replacement);
std::string termStr(const TermPtr& t);

// Atom t1 <= t2; the only primitive comparison (equality and strict
// comparisons are parser macros over it).
struct SemiringAtom {
  TermPtr lhs, rhs;
  bool operator==(const SemiringAtom& o) const {
    return termEqual(lhs, o.lhs) && termEqual(rhs, o.rhs);
  }
};

// Assignment v := t.
struct SemiringProg {
  VarId target;
  TermPtr rhs;
  bool operator==(const SemiringProg& o) const {
    return target == o.target && termEqual(rhs, o.rhs);
  }
};

enum class Carrier { Int, Nat };

// Windowed sampling/quantifier instantiation over an infinite carrier.
// Renamable, eq-predicate and inductive-expressivity capabilities.
TheoryPtr semiringTheory(Carrier carrier, Window window = {-100, 100});

Carrier semiringCarrier(const Theory& th);  // throws if not a semiring
Atom semiringLeq(const Theory& th, TermPtr lhs, TermPtr rhs);
Program semiringAssign(const Theory& th, VarId v, TermPtr t);
// Peels lift layers down to a semiring instance; nullptr when the
// underlying instance is not a semiring.
const Theory* underlyingSemiring(const Theory& th);

// Lemma-style inductive-expressivity witness for the nat/int carriers.
std::shared_ptr<const InductiveExpressivity> semiringInductiveInstance(
    const Theory& th);

// --- Kripke frames -----------------------------------------------------------

struct KripkeModel {
  std::vector<std::string> states;
  // program name -> transition pairs (indices into states)
  std::vector<std::pair<std::string, std::vector<std::pair<int, int>>>> programs;
  // atom name -> set of state indices where it holds
  std::vector<std::pair<std::string, std::vector<int>>> atoms;
};

// Finite-enumerable theory; exhaustive validity is decidable.
TheoryPtr kripkeTheory(KripkeModel model);

Atom kripkeAtom(const Theory& th, const std::string& name);
Program kripkeProgram(const Theory& th, const std::string& name);
VarId kripkeWorldVar(const Theory& th);

// --- term-level substitution through formulas --------------------------------

// f[t/v] with capture checks: quantifiers and havocs binding variables of
// t on the path to an occurrence of v are rejected, assignment targets are
// never substituted, and boxes that bind v make the result undefined.
// Works on formulas whose atoms are semiring atoms (possibly under lifted
// theories). Throws TheoryError on capture.
Formula substituteTerm(const Theory& th, const Formula& f, VarId v,
                       const TermPtr& t);

}  // namespace dynth

#endif  // DYNTH_INSTANCES_HPP_
