// LCF-style proof kernel: Theorem values are constructible only through
// the operations declared here. A theorem carries the owning theory, a set
// Gamma of modality-free assumption formulas, and a conclusion; whenever
// every member of Gamma is valid, the conclusion is valid.

#ifndef DYNTH_KERNEL_HPP_
#define DYNTH_KERNEL_HPP_

#include <string>
#include <vector>

#include "dynth/theory.hpp"

namespace dynth {

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Theorem {
 public:
  TheoryId theoryId() const { return theory_; }
  const std::vector<Formula>& gamma() const { return gamma_; }
  const Formula& conclusion() const { return conclusion_; }

 private:
  friend struct ThmMaker;
  Theorem(TheoryId th, std::vector<Formula> gamma, Formula conclusion)
      : theory_(th), gamma_(std::move(gamma)), conclusion_(std::move(conclusion)) {}
  TheoryId theory_;
  std::vector<Formula> gamma_;  // modality-free, deduplicated
  Formula conclusion_;
};

namespace kernel {

// --- elementary axioms and rules (any dynamic theory) ------------------------

enum class ElementaryAxiom { K, V, B };

// K: [p](f->g) -> ([p]f -> [p]g)
// V: f -> [p]f            (fv(f) and bv(p) disjoint)
// B: (forall v. [p]f) <-> [p] forall v. f   (v not in fv(p) or bv(p))
Theorem axK(const Theory& th, const Program& p, const Formula& f,
            const Formula& g);
Theorem axV(const Theory& th, const Program& p, const Formula& f);
Theorem axB(const Theory& th, const Program& p, VarId v, const Formula& f);

// G: from |- f infer |- [p]f
Theorem ruleG(const Theory& th, const Theorem& premise, const Program& p);

// --- first-order layer --------------------------------------------------------

// Gamma = {f}, conclusion f; f must be modality-free.
Theorem assume(const Theory& th, const Formula& f);
// Propositional tautology over opaque letters (atoms, quantified and boxed
// subformulas); decided by truth table, at most 20 letters.
Theorem taut(const Theory& th, const Formula& f);
Theorem mp(const Theory& th, const Theorem& implication,
           const Theorem& antecedent);
Theorem gen(const Theory& th, const Theorem& premise, VarId v);
// (forall v. f) -> f[w/v]; capture-free variable-for-variable renaming
// (w == v always works; w != v needs the renamable capability).
Theorem axForallElim(const Theory& th, VarId v, VarId w, const Formula& f);
// forall-elimination applied to a theorem.
Theorem instThm(const Theory& th, const Theorem& premise, VarId v, VarId w);
// forall v.(f->g) -> (forall v. f -> forall v. g)
Theorem axQDist(const Theory& th, VarId v, const Formula& f, const Formula& g);
// f -> forall v. f   (v not free in f)
Theorem axVacuous(const Theory& th, VarId v, const Formula& f);
// v =. v  (eq-predicate capability)
Theorem axIdentityEq(const Theory& th, VarId v);

// Variable-for-variable substitution f[w/v] with capture checks; used by
// axForallElim and exposed for tests.
Formula substVar(const Theory& th, const Formula& f, VarId v, VarId w);

// --- lifting axioms -----------------------------------------------------------

// [v := *]f <-> forall v. f   (havoc-lifted theories)
Theorem axHavoc(const Theory& th, VarId v, const Formula& f);

enum class ReduceRule { HR, RR, HR0, HR1 };
// Maps a theorem of the base (or world-i) theory into the lifted (or
// heterogeneous) target; conclusion and gamma are embedded.
Theorem ruleReduce(ReduceRule kind, const Theorem& premise, const Theory& target);

// Regular-program axioms ([?(g)]f, [p;q]f, [p++q]f, [p*]f, induction I).
Theorem axTest(const Theory& th, const Formula& guard, const Formula& f);
Theorem axSeq(const Theory& th, const Program& p, const Program& q,
              const Formula& f);
Theorem axChoice(const Theory& th, const Program& p, const Program& q,
                 const Formula& f);
Theorem axStar(const Theory& th, const Program& p, const Formula& f);
Theorem axI(const Theory& th, const Program& p, const Formula& f);

// Loop convergence over an inductively expressive theory:
//   [p*](all v.(nat>0(v) & f -> <p> all w.(nat+1(w,v) ->
//        all v.(nat=(v,w) -> f))))
//   ->  all v.(f -> <p*> exists v.(!nat>0(v) & f))
// with v, w distinct counting variables, w not free in f, and v, w
// untouched by p.
Theorem axC(const Theory& th, const InductiveExpressivity& ind,
            const Program& p, const Formula& f, VarId v, VarId w);

// --- derived rules (replayed through the primitives above) --------------------

Theorem ruleM(const Theory& th, const Theorem& premise, const Program& p);
Theorem ruleMR(const Theory& th, const Theorem& xiImpBoxPhi,
               const Theorem& phiImpPsi);
Theorem axBoxAnd(const Theory& th, const Program& p, const Formula& f,
                 const Formula& g);
Theorem axKDia(const Theory& th, const Program& p, const Formula& f,
               const Formula& g);
Theorem axMPDia(const Theory& th, const Program& p, const Formula& psi,
                const Formula& phi, const std::vector<VarId>& vec);
Theorem axPB(const Theory& th, const Program& p, const Formula& phi,
             const Formula& psi, const Formula& xi,
             const std::vector<VarId>& vec, const std::vector<VarId>& vecPlus);
Theorem ruleInd(const Theory& th, const Theorem& premise);
// Frame rule: (psi -> [alpha]xi) -> (frame & psi -> [alpha](xi & frame))
// for alpha a pure world-(1-i) program and frame a pure world-i formula.
Theorem axFi(const Theory& th, int i, const Program& alpha, const Formula& psi,
             const Formula& xi, const Formula& frame);
// [v := *; ?(v =. w)]f -> f   (v not free in f; eq-predicate capability)
Theorem axGhost(const Theory& th, VarId v, VarId w, const Formula& f);

// --- helpers shared by scripts and tests ---------------------------------------

// From |- a<->b produce |- [p]a <-> [p]b.
Theorem boxCongruence(const Theory& th, const Program& p, const Theorem& iff);
// From |- a->b and |- b->c produce |- a->c.
Theorem chainImp(const Theory& th, const Theorem& ab, const Theorem& bc);
// Extract one direction of an iff-shaped theorem (0: ->, 1: <-).
Theorem iffDir(const Theory& th, const Theorem& iff, int dir);

bool isPropTautology(const Formula& f, int maxLetters = 20);

}  // namespace kernel
}  // namespace dynth

#endif  // DYNTH_KERNEL_HPP_
