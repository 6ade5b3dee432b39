// Theory transformers: extend a base theory with the havoc operator and
// with the closure over regular programs. Both preserve the theory laws;
// lifted handles capture their base by shared ownership.

#ifndef DYNTH_LIFTING_HPP_
#define DYNTH_LIFTING_HPP_

#include <memory>

#include "dynth/theory.hpp"

namespace dynth {

// Program payload of a havoc-lifted theory: Base(p) | Havoc(v).
struct HavocProg {
  bool isHavoc = false;
  Program basePgm;  // when !isHavoc
  VarId var;        // when isHavoc

  bool operator==(const HavocProg& o) const {
    if (isHavoc != o.isHavoc) return false;
    return isHavoc ? var == o.var : basePgm.structurallyEqual(o.basePgm);
  }
};

// Program payload of a regular-closure theory.
struct RegularProg {
  enum class Tag : std::uint8_t { Base, Seq, Choice, Test, Star };
  Tag tag = Tag::Base;
  Program basePgm;                          // Base
  std::shared_ptr<const RegularProg> p, q;  // Seq/Choice/Star
  Formula testFml;                          // Test (modality-free)

  bool operator==(const RegularProg& o) const;
};

TheoryPtr liftHavoc(TheoryPtr base);
TheoryPtr liftRegular(TheoryPtr base);

// Program constructors on a regular-lifted theory.
Program regBase(const Theory& th, Program baseProgram);  // wraps a base program
Program regSeq(const Theory& th, Program p, Program q);
Program regChoice(const Theory& th, Program p, Program q);
Program regTest(const Theory& th, Formula modalityFree);
Program regStar(const Theory& th, Program p);

// Views (nullptr when the program is not of that theory/shape).
const HavocProg* asHavocProg(const Theory& havocTh, const Program& p);
const RegularProg* asRegularProg(const Theory& regTh, const Program& p);

// Structurally identical formula with programs wrapped for the lifted
// theory; evaluation agrees state-wise with the base theory.
Formula embedFormula(const Formula& baseFormula, const Theory& lifted);
// Inverse of embedFormula on embedded formulas (round-trip check support).
Formula unembedFormula(const Formula& liftedFormula, const Theory& lifted);

// Least fixpoint of one-step extension of `p` starting from `from`
// (finite-enumerable theories).
std::vector<State> starFixpoint(const Theory& th, const Program& p,
                                const State& from);
// Union of the unrollings p^0..p^n.
std::vector<State> starUnrollings(const Theory& th, const Program& p,
                                  const State& from, int n);

}  // namespace dynth

#endif  // DYNTH_LIFTING_HPP_
