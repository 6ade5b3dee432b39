#include "dynth/instance_calculus.hpp"

#include <sstream>

#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"
#include "theorem_maker.hpp"

namespace dynth {
namespace kernel {

namespace {

[[noreturn]] void bail(const std::string& msg) { throw KernelError(msg); }

// Wraps an instance-level program through the lift layers up to `th`.
Program embedToTheory(const Theory& th, const Theory& instance, Program p) {
  std::vector<const Theory*> chain;
  const Theory* cur = &th;
  while (cur && cur != &instance) {
    chain.push_back(cur);
    cur = cur->base();
  }
  if (cur != &instance) bail("program does not live under " + th.describe());
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    auto e = (*it)->embedProgramFromBase(p);
    if (!e) bail("embedding failed through " + (*it)->describe());
    p = *e;
  }
  return p;
}

}  // namespace

Theorem axAssign(const Theory& th, VarId v, const TermPtr& t, const Formula& f) {
  const Theory* instance = underlyingSemiring(th);
  if (!instance)
    bail("assign axiom: " + th.describe() + " is not built over a semiring");
  checkWellFormed(th, f);
  Program assignAtInstance = semiringAssign(*instance, v, t);
  Program prog = embedToTheory(th, *instance, assignAtInstance);
  Formula substituted;
  try {
    substituted = substituteTerm(th, f, v, t);
  } catch (const TheoryError& e) {
    bail(std::string("assign axiom: ") + e.what());
  }
  return ThmMaker::make(th.id(), {},
                        Formula::iff(Formula::box(prog, f), substituted));
}

Theorem finiteValid(const Theory& th, const Formula& f) {
  if (!th.finiteEnumerable())
    bail("finite-valid: " + th.describe() + " is not finite-enumerable");
  checkWellFormed(th, f);
  EvalBudget b;
  b.quantCap = 1 << 20;
  b.starDepth = 1 << 20;
  for (const State& s : th.enumerateStates()) {
    if (evalFormula(th, s, f, b) != Verdict::True) {
      std::ostringstream os;
      os << "finite-valid: counterexample at state " << s.str();
      bail(os.str());
    }
  }
  return ThmMaker::make(th.id(), {}, f);
}

}  // namespace kernel

// --- renditions ---------------------------------------------------------------

namespace {



struct RenditionBuilder {
  const Theory& th;        // regular-lifted theory the program lives in
  const Theory& instance;  // underlying semiring
  int freshCounter = 0;

  Formula eq(VarId a, VarId b) const {
    auto e = th.eqPredicate(a, b);
    if (!e) throw TheoryError("rendition needs the eq-predicate capability");
    return *e;
  }

  Formula frameExcept(const std::vector<VarId>& pre,
                      const std::vector<VarId>& post,
                      std::optional<VarId> skip) const {
    std::optional<Formula> acc;
    for (std::size_t i = 0; i < pre.size(); ++i) {
      if (skip && pre[i] == *skip) continue;
      Formula e = eq(pre[i], post[i]);
      acc = acc ? Formula::mkAnd(*acc, e) : e;
    }
    if (!acc) return *th.verum();
    return *acc;
  }

  std::vector<VarId> freshVector(const std::vector<VarId>& model) {
    std::vector<VarId> out;
    ++freshCounter;
    for (VarId v : model)
      out.push_back(
          VarId::intern(v.name() + "'" + std::to_string(freshCounter)));
    return out;
  }

  // Renames original variables xs to the vector `pre` inside a formula.
  Formula renameTo(const Formula& f, const std::vector<VarId>& orig,
                   const std::vector<VarId>& pre) const {
    Formula out = f;
    for (std::size_t i = 0; i < orig.size(); ++i) {
      if (orig[i] == pre[i]) continue;
      out = kernel::substVar(th, out, orig[i], pre[i]);
    }
    return out;
  }

  TermPtr renameTerm(TermPtr t, const std::vector<VarId>& orig,
                     const std::vector<VarId>& pre) const {
    for (std::size_t i = 0; i < orig.size(); ++i)
      if (!(orig[i] == pre[i])) t = termRename(t, orig[i], pre[i]);
    return t;
  }

  int indexOf(const std::vector<VarId>& xs, VarId v) const {
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] == v) return static_cast<int>(i);
    return -1;
  }

  // S_p(pre, post) where pre/post are twin vectors for the original xs.
  Formula build(const Program& p, const std::vector<VarId>& orig,
                const std::vector<VarId>& pre,
                const std::vector<VarId>& post) {
    if (const auto* rp = asRegularProg(th, p)) {
      switch (rp->tag) {
        case RegularProg::Tag::Star:
          throw TheoryError(
              "rendition: star programs are not loop-free");
        case RegularProg::Tag::Base:
          return buildBase(rp->basePgm, *th.base(), orig, pre, post);
        case RegularProg::Tag::Test: {
          Formula guard = renameTo(rp->testFml, orig, pre);
          return Formula::mkAnd(frameExcept(pre, post, std::nullopt), guard);
        }
        case RegularProg::Tag::Choice: {
          Program a = Program::make<RegularProg>(th.id(), *rp->p);
          Program b = Program::make<RegularProg>(th.id(), *rp->q);
          return Formula::mkOr(build(a, orig, pre, post),
                               build(b, orig, pre, post));
        }
        case RegularProg::Tag::Seq: {
          Program a = Program::make<RegularProg>(th.id(), *rp->p);
          Program b = Program::make<RegularProg>(th.id(), *rp->q);
          std::vector<VarId> mid = freshVector(orig);
          Formula left = build(a, orig, pre, mid);
          Formula right = build(b, orig, mid, post);
          Formula body = Formula::mkAnd(left, right);
          for (auto it = mid.rbegin(); it != mid.rend(); ++it)
            body = Formula::exists(*it, body);
          return body;
        }
      }
    }
    throw TheoryError("rendition: program is not a regular program of " +
                      th.describe());
  }

  Formula buildBase(const Program& p, const Theory& layer,
                    const std::vector<VarId>& orig,
                    const std::vector<VarId>& pre,
                    const std::vector<VarId>& post) {
    if (const auto* hp = asHavocProg(layer, p)) {
      if (hp->isHavoc) {
        int idx = indexOf(orig, hp->var);
        if (idx < 0)
          throw TheoryError("rendition: havoc variable " + hp->var.name() +
                            " is outside the vector");
        return frameExcept(pre, post, pre[idx]);
      }
      return buildBase(hp->basePgm, *layer.base(), orig, pre, post);
    }
    if (const auto* sp = p.as<SemiringProg>()) {
      int idx = indexOf(orig, sp->target);
      if (idx < 0)
        throw TheoryError("rendition: assignment target " +
                          sp->target.name() + " is outside the vector");
      TermPtr rhs = renameTerm(sp->rhs, orig, pre);
      Formula update = Formula::mkAnd(
          Formula::atom(semiringLeq(instance, rhs, termVar(post[idx]))),
          Formula::atom(semiringLeq(instance, termVar(post[idx]), rhs)));
      Formula frame = frameExcept(pre, post, pre[idx]);
      // keep the update first so simple assignments read naturally
      if (pre.size() == 1) return update;
      return Formula::mkAnd(update, frame);
    }
    throw TheoryError("rendition: unsupported base program");
  }
};

}  // namespace

Formula renditionLoopfree(const Theory& th, const Program& p,
                          const std::vector<VarId>& xs,
                          const std::vector<VarId>& xsNext) {
  if (!th.regularLifted())
    throw TheoryError("rendition: theory must be regular-lifted");
  const Theory* instance = underlyingSemiring(th);
  if (!instance)
    throw TheoryError("rendition: underlying instance must be a semiring");
  if (xs.size() != xsNext.size())
    throw TheoryError("rendition: vector length mismatch");
  VarSetBase xsSet{std::vector<VarId>(xs.begin(), xs.end())};
  VarSetBase nextSet{std::vector<VarId>(xsNext.begin(), xsNext.end())};
  if (!xsSet.disjoint(nextSet))
    throw TheoryError("rendition: twin vector must be disjoint from xs");
  VarSetBase need = th.progFv(p);
  need.unite(th.progBv(p));
  if (!xsSet.supersetOf(need))
    throw TheoryError("rendition: xs must cover fv(p) and bv(p), i.e. " +
                      need.str());
  RenditionBuilder b{th, *instance};
  return b.build(p, xs, xs, xsNext);
}

}  // namespace dynth
