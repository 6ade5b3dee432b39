// Instance-level calculus: the assignment axiom for semiring theories, the
// exhaustive decision procedure for finite theories, and loop-free program
// renditions over twin variable vectors.

#ifndef DYNTH_INSTANCE_CALCULUS_HPP_
#define DYNTH_INSTANCE_CALCULUS_HPP_

#include "dynth/instances.hpp"
#include "dynth/kernel.hpp"

namespace dynth {
namespace kernel {

// [v := t]f <-> f[t/v] for theories whose underlying instance is a
// semiring; the substitution must be capture-free.
Theorem axAssign(const Theory& th, VarId v, const TermPtr& t, const Formula& f);

// Decision procedure for finite-enumerable theories: a theorem when the
// formula is exhaustively valid, a KernelError naming a counterexample
// state otherwise.
Theorem finiteValid(const Theory& th, const Formula& f);

}  // namespace kernel

// Modality-free formula characterizing the transition relation of a
// star-free regular program under the twin-state reading: (mu, nu) is a
// transition iff the twin state satisfies the rendition and mu, nu agree
// outside xs. xs must cover fv(p) and bv(p); xsNext is a disjoint twin
// vector.
Formula renditionLoopfree(const Theory& th, const Program& p,
                          const std::vector<VarId>& xs,
                          const std::vector<VarId>& xsNext);

}  // namespace dynth

#endif  // DYNTH_INSTANCE_CALCULUS_HPP_
