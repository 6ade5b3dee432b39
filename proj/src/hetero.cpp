#include "dynth/hetero.hpp"

#include <algorithm>
#include <sstream>

#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"

namespace dynth {

HeteroAtom couplingEq(VarId v0, VarId v1) {
  if (v0.world() != 0 || v1.world() != 1)
    throw TheoryError("eq coupling needs a world-0 and a world-1 variable, got " +
                      v0.name() + ", " + v1.name());
  HeteroAtom a;
  a.name = "eq";
  a.args = {v0, v1};
  a.declaredFv = {v0, v1};
  a.predicate = [v0, v1](const State& s) { return s.get(v0) == s.get(v1); };
  return a;
}

HeteroAtom couplingScaledEq(VarId v0, VarId v1, Value k) {
  if (v0.world() != 0 || v1.world() != 1)
    throw TheoryError(
        "scaled_eq coupling needs a world-0 and a world-1 variable, got " +
        v0.name() + ", " + v1.name());
  if (k == 0) throw TheoryError("scaled_eq factor must be nonzero");
  HeteroAtom a;
  a.name = "scaled_eq";
  a.args = {v0, v1};
  a.scale = k;
  a.declaredFv = {v0, v1};
  a.predicate = [v0, v1, k](const State& s) {
    return s.get(v0) == k * s.get(v1);
  };
  return a;
}

CombinedTheory::CombinedTheory(TheoryPtr w0, TheoryPtr w1,
                               std::vector<HeteroAtom> couplings,
                               std::string prefix0, std::string prefix1)
    : w0_(std::move(w0)),
      w1_(std::move(w1)),
      couplings_(std::move(couplings)),
      p0_(std::move(prefix0)),
      p1_(std::move(prefix1)) {
  if (p0_ == p1_ || p0_.empty() || p1_.empty() ||
      p0_.rfind(p1_, 0) == 0 || p1_.rfind(p0_, 0) == 0)
    throw TheoryError("world prefixes collide: '" + p0_ + "' vs '" + p1_ + "'");
  if (w0_->defaultValue() != w1_->defaultValue())
    throw TheoryError("combined worlds must share the default value");
  for (const auto& c : couplings_) {
    if (c.declaredFv.empty())
      throw TheoryError("coupling " + c.name + " declares no variables");
    for (VarId v : c.declaredFv)
      if (!ownsVar(v))
        throw TheoryError("coupling " + c.name + " names unknown variable " +
                          v.name());
  }
}

std::string CombinedTheory::describe() const {
  return "combine(" + w0_->describe() + ", " + w1_->describe() + ")";
}

VarId CombinedTheory::prefixVar(int i, VarId nativeVar) const {
  return VarId::intern(prefix(i) + nativeVar.name(), i);
}

VarId CombinedTheory::nativeVar(VarId v) const {
  int i = v.world();
  const Theory& w = i == 0 ? *w0_ : *w1_;
  return w.internVar(v.name().substr(prefix(i).size()));
}

int CombinedTheory::varWorldOf(VarId v) const {
  return ownsVar(v) ? v.world() : -1;
}

bool CombinedTheory::ownsVar(VarId v) const {
  int i = v.world();
  if (i != 0 && i != 1) return false;
  const std::string& pre = prefix(i);
  if (v.name().rfind(pre, 0) != 0) return false;
  const Theory& w = i == 0 ? *w0_ : *w1_;
  return w.ownsVar(w.internVar(v.name().substr(pre.size())));
}

VarId CombinedTheory::internVar(const std::string& name) const {
  if (name.rfind(p0_, 0) == 0) return VarId::intern(name, 0);
  if (name.rfind(p1_, 0) == 0) return VarId::intern(name, 1);
  return VarId::intern(name);  // not owned; ownership checks reject it
}

std::vector<VarId> CombinedTheory::varPool() const {
  std::vector<VarId> out;
  for (VarId v : w0_->varPool()) out.push_back(prefixVar(0, v));
  for (VarId v : w1_->varPool()) out.push_back(prefixVar(1, v));
  return out;
}

State CombinedTheory::projectWorld(int i, const State& s) const {
  const Theory& w = i == 0 ? *w0_ : *w1_;
  State native(w.defaultValue());
  for (const auto& [pv, val] : s.support())
    if (pv.world() == i && ownsVar(pv)) native.set(nativeVar(pv), val);
  return native;
}

State CombinedTheory::injectWorld(int i, const State& s,
                                  const State& nativeComponent) const {
  State out = s;
  for (const auto& [pv, val] : s.support())
    if (pv.world() == i && ownsVar(pv)) out.set(pv, s.defaultValue());
  for (const auto& [nv, val] : nativeComponent.support())
    out.set(prefixVar(i, nv), val);
  return out;
}

Atom CombinedTheory::wrapWorldAtom(int i, Atom nativeAtom) const {
  return Atom::make(id(), WorldAtomP{i, std::move(nativeAtom)});
}

Program CombinedTheory::wrapWorldProgram(int i, Program nativeProgram) const {
  return Program::make(id(), WorldProgP{i, std::move(nativeProgram)});
}

Atom CombinedTheory::couplingAtom(int index) const {
  if (index < 0 || index >= static_cast<int>(couplings_.size()))
    throw TheoryError("coupling index out of range");
  return Atom::make(id(), CouplingAtomP{index});
}

int CombinedTheory::couplingIndexOf(const HeteroAtom& a) const {
  for (std::size_t i = 0; i < couplings_.size(); ++i)
    if (couplings_[i] == a) return static_cast<int>(i);
  return -1;
}

bool CombinedTheory::ownsAtom(const Atom& a) const {
  if (a.signature() != id()) return false;
  if (const auto* wa = a.as<WorldAtomP>())
    return (wa->world == 0 ? w0_ : w1_)->ownsAtom(wa->inner);
  return a.as<CouplingAtomP>() != nullptr;
}

bool CombinedTheory::ownsProgram(const Program& p) const {
  if (p.signature() != id()) return false;
  const auto* wp = p.as<WorldProgP>();
  return wp && (wp->world == 0 ? w0_ : w1_)->ownsProgram(wp->inner);
}

bool CombinedTheory::finiteEnumerable() const {
  return w0_->finiteEnumerable() && w1_->finiteEnumerable();
}

std::vector<State> CombinedTheory::enumerateStates() const {
  if (!finiteEnumerable())
    throw TheoryError("enumerateStates: combined theory is not finite");
  std::vector<State> out;
  for (const State& a : w0_->enumerateStates())
    for (const State& b : w1_->enumerateStates()) {
      State s = initialState();
      for (const auto& [v, val] : a.support()) s.set(prefixVar(0, v), val);
      for (const auto& [v, val] : b.support()) s.set(prefixVar(1, v), val);
      out.push_back(std::move(s));
    }
  return out;
}

EvalBudget CombinedTheory::worldBudget(int i, const EvalBudget& b) const {
  EvalBudget wb = b;
  if (i == 0 && b.window0) wb.window = *b.window0;
  if (i == 1 && b.window1) wb.window = *b.window1;
  wb.window0.reset();
  wb.window1.reset();
  return wb;
}

std::vector<Value> CombinedTheory::valueWindow(VarId v,
                                               const EvalBudget& b) const {
  int i = varWorldOf(v);
  if (i < 0) throw TheoryError("variable " + v.name() + " not owned by " + describe());
  const Theory& w = i == 0 ? *w0_ : *w1_;
  return w.valueWindow(nativeVar(v), worldBudget(i, b));
}

bool CombinedTheory::windowExhaustive(VarId v, const EvalBudget& b) const {
  int i = varWorldOf(v);
  if (i < 0) return false;
  const Theory& w = i == 0 ? *w0_ : *w1_;
  return w.windowExhaustive(nativeVar(v), worldBudget(i, b));
}

bool CombinedTheory::atomEval(const State& s, const Atom& a) const {
  if (const auto* wa = a.as<WorldAtomP>()) {
    const Theory& w = wa->world == 0 ? *w0_ : *w1_;
    return w.atomEval(projectWorld(wa->world, s), wa->inner);
  }
  const auto* ca = a.as<CouplingAtomP>();
  if (!ca || a.signature() != id())
    throw TheoryError("atom does not belong to " + describe());
  return couplings_[ca->index].predicate(s);
}

VarSetBase CombinedTheory::atomFv(const Atom& a) const {
  if (const auto* wa = a.as<WorldAtomP>()) {
    const Theory& w = wa->world == 0 ? *w0_ : *w1_;
    VarSetBase out;
    for (VarId v : w.atomFv(wa->inner)) out.insert(prefixVar(wa->world, v));
    return out;
  }
  const auto* ca = a.as<CouplingAtomP>();
  if (!ca || a.signature() != id())
    throw TheoryError("atom does not belong to " + describe());
  return couplings_[ca->index].declaredFv;
}

SuccessorSet CombinedTheory::progSucc(const State& s, const Program& p,
                                      const EvalBudget& b) const {
  const auto* wp = p.as<WorldProgP>();
  if (!wp || p.signature() != id())
    throw TheoryError("program does not belong to " + describe());
  const Theory& w = wp->world == 0 ? *w0_ : *w1_;
  SuccessorSet native =
      w.progSucc(projectWorld(wp->world, s), wp->inner, worldBudget(wp->world, b));
  SuccessorSet out;
  out.truncated = native.truncated;
  for (const State& n : native.states)
    out.states.push_back(injectWorld(wp->world, s, n));
  return out;
}

VarSetBase CombinedTheory::progFv(const Program& p) const {
  const auto* wp = p.as<WorldProgP>();
  if (!wp || p.signature() != id())
    throw TheoryError("program does not belong to " + describe());
  const Theory& w = wp->world == 0 ? *w0_ : *w1_;
  VarSetBase out;
  for (VarId v : w.progFv(wp->inner)) out.insert(prefixVar(wp->world, v));
  return out;
}

VarSetBase CombinedTheory::progBv(const Program& p) const {
  const auto* wp = p.as<WorldProgP>();
  if (!wp || p.signature() != id())
    throw TheoryError("program does not belong to " + describe());
  const Theory& w = wp->world == 0 ? *w0_ : *w1_;
  VarSetBase out;
  for (VarId v : w.progBv(wp->inner)) out.insert(prefixVar(wp->world, v));
  return out;
}

bool CombinedTheory::renamable() const {
  return w0_->renamable() && w1_->renamable();
}

std::optional<Atom> CombinedTheory::renameAtomVar(const Atom& a, VarId from,
                                                  VarId to) const {
  if (const auto* wa = a.as<WorldAtomP>()) {
    int i = wa->world;
    if (varWorldOf(from) != i || varWorldOf(to) != i) {
      if (varWorldOf(from) != i) return a;  // variable not read by this world
      return std::nullopt;
    }
    const Theory& w = i == 0 ? *w0_ : *w1_;
    auto r = w.renameAtomVar(wa->inner, nativeVar(from), nativeVar(to));
    if (!r) return std::nullopt;
    return wrapWorldAtom(i, *r);
  }
  if (const auto* ca = a.as<CouplingAtomP>()) {
    HeteroAtom c = couplings_[ca->index];
    bool touched = false;
    for (VarId& v : c.args)
      if (v == from) {
        v = to;
        touched = true;
      }
    if (!touched) return a;
    // Rebuild the predicate over the renamed arguments.
    HeteroAtom renamed = c.name == "eq" ? couplingEq(c.args[0], c.args[1])
                                        : couplingScaledEq(c.args[0], c.args[1],
                                                           c.scale);
    int idx = couplingIndexOf(renamed);
    if (idx < 0) return std::nullopt;  // renaming left the declared set
    return couplingAtom(idx);
  }
  return std::nullopt;
}

std::optional<Program> CombinedTheory::renameProgramVar(const Program& p,
                                                        VarId from,
                                                        VarId to) const {
  const auto* wp = p.as<WorldProgP>();
  if (!wp) return std::nullopt;
  int i = wp->world;
  if (varWorldOf(from) != i) return p;
  if (varWorldOf(to) != i) return std::nullopt;
  const Theory& w = i == 0 ? *w0_ : *w1_;
  auto r = w.renameProgramVar(wp->inner, nativeVar(from), nativeVar(to));
  if (!r) return std::nullopt;
  return wrapWorldProgram(i, *r);
}

std::optional<Formula> CombinedTheory::eqPredicate(VarId v, VarId w) const {
  int i = varWorldOf(v);
  if (i < 0 || varWorldOf(w) != i) return std::nullopt;  // cross-world only via couplings
  const Theory& wt = i == 0 ? *w0_ : *w1_;
  auto native = wt.eqPredicate(nativeVar(v), nativeVar(w));
  if (!native) return std::nullopt;
  return embedWorldFormula(*this, i, *native);
}

std::shared_ptr<const InductiveExpressivity> CombinedTheory::inductive() const {
  if (w0_->inductive()) return heteroInductiveInstance(0, *this);
  if (w1_->inductive()) return heteroInductiveInstance(1, *this);
  return nullptr;
}

std::optional<Formula> CombinedTheory::verum() const {
  auto v0 = w0_->verum();
  if (v0) return embedWorldFormula(*this, 0, *v0);
  auto v1 = w1_->verum();
  if (v1) return embedWorldFormula(*this, 1, *v1);
  return std::nullopt;
}

State CombinedTheory::sampleState(Rng& rng, const EvalBudget& b) const {
  State s = initialState();
  State a = w0_->sampleState(rng, worldBudget(0, b));
  State c = w1_->sampleState(rng, worldBudget(1, b));
  for (const auto& [v, val] : a.support()) s.set(prefixVar(0, v), val);
  for (const auto& [v, val] : c.support()) s.set(prefixVar(1, v), val);
  return s;
}

Atom CombinedTheory::sampleAtom(Rng& rng) const {
  if (!couplings_.empty() && rng.chance(0.3))
    return couplingAtom(static_cast<int>(rng.next() % couplings_.size()));
  int i = rng.chance(0.5) ? 0 : 1;
  const Theory& w = i == 0 ? *w0_ : *w1_;
  // ground atoms carry no syntactic world marker, so keep sampling until
  // the atom mentions a variable
  for (int attempt = 0; attempt < 16; ++attempt) {
    Atom a = w.sampleAtom(rng);
    if (!w.atomFv(a).empty()) return wrapWorldAtom(i, a);
  }
  return wrapWorldAtom(
      i, w.sampleAtom(rng));
}

Program CombinedTheory::sampleProgram(Rng& rng, int depth) const {
  int i = rng.chance(0.5) ? 0 : 1;
  const Theory& w = i == 0 ? *w0_ : *w1_;
  return wrapWorldProgram(i, w.sampleProgram(rng, depth));
}

Theory::IdentMapper CombinedTheory::composeMapper(
    int i, const IdentMapper& outer) const {
  std::string pre = prefix(i);
  if (!outer) return [pre](const std::string& n) { return pre + n; };
  return [pre, outer](const std::string& n) { return outer(pre + n); };
}

void CombinedTheory::printAtomMapped(std::ostream& os, const Atom& a,
                                     const IdentMapper& m) const {
  if (const auto* wa = a.as<WorldAtomP>()) {
    const Theory& w = wa->world == 0 ? *w0_ : *w1_;
    w.printAtomMapped(os, wa->inner, composeMapper(wa->world, m));
    return;
  }
  const auto* ca = a.as<CouplingAtomP>();
  if (!ca) throw TheoryError("atom does not belong to " + describe());
  const HeteroAtom& c = couplings_[ca->index];
  os << c.name << '(';
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    if (i) os << ", ";
    os << (m ? m(c.args[i].name()) : c.args[i].name());
  }
  if (c.name == "scaled_eq") os << ", " << c.scale;
  os << ')';
}

void CombinedTheory::printProgramMapped(std::ostream& os, const Program& p,
                                        const IdentMapper& m) const {
  const auto* wp = p.as<WorldProgP>();
  if (!wp) throw TheoryError("program does not belong to " + describe());
  const Theory& w = wp->world == 0 ? *w0_ : *w1_;
  w.printProgramMapped(os, wp->inner, composeMapper(wp->world, m));
}

void CombinedTheory::printValue(std::ostream& os, VarId v, Value val) const {
  int i = varWorldOf(v);
  if (i < 0) {
    os << val;
    return;
  }
  const Theory& w = i == 0 ? *w0_ : *w1_;
  w.printValue(os, nativeVar(v), val);
}

namespace {

// RAII guard swapping the lexer's identifier transform.
struct TransformGuard {
  TransformGuard(Lexer& lx, Lexer::IdentTransform t) : lx_(lx) {
    saved_ = lx_.identTransform;
    lx_.identTransform = std::move(t);
  }
  ~TransformGuard() { lx_.identTransform = saved_; }
  Lexer& lx_;
  Lexer::IdentTransform saved_;
};

Lexer::IdentTransform stripPrefix(const std::string& prefix,
                                  Lexer::IdentTransform outer, Lexer& lx) {
  return [prefix, outer, &lx](const std::string& raw) {
    std::string n = outer ? outer(raw) : raw;
    if (n.rfind(prefix, 0) != 0)
      lx.fail("identifier '" + n + "' is not in world prefixed '" + prefix +
              "'");
    return n.substr(prefix.size());
  };
}

}  // namespace

Formula CombinedTheory::parseAtomicFormula(Lexer& lx) const {
  // Couplings first: eq(...), scaled_eq(...).
  if ((lx.peekIsIdent("eq") || lx.peekIsIdent("scaled_eq"))) {
    auto m = lx.mark();
    std::string head = lx.expectIdent("coupling");
    if (lx.accept("(")) {
      VarId a0 = internVar(lx.transformed(lx.expectIdent("variable")));
      lx.expect(",");
      VarId a1 = internVar(lx.transformed(lx.expectIdent("variable")));
      HeteroAtom probe;
      if (head == "scaled_eq") {
        lx.expect(",");
        probe = couplingScaledEq(a0, a1, lx.expectInt("scale factor"));
      } else {
        probe = couplingEq(a0, a1);
      }
      lx.expect(")");
      int idx = couplingIndexOf(probe);
      if (idx < 0)
        lx.fail("coupling " + head + "(" + a0.name() + ", " + a1.name() +
                (head == "scaled_eq" ? ", " + std::to_string(probe.scale) : "") +
                ") is not declared for this combination");
      return Formula::atom(couplingAtom(idx));
    }
    lx.rewind(m);
  }
  // Otherwise route to a world by attempting each with its prefix stripped.
  auto m = lx.mark();
  Lexer::IdentTransform outer = lx.identTransform;
  try {
    TransformGuard g(lx, stripPrefix(p0_, outer, lx));
    Formula native = w0_->parseAtomicFormula(lx);
    return embedWorldFormula(*this, 0, native);
  } catch (const ParseError& e0) {
    lx.rewind(m);
    try {
      TransformGuard g(lx, stripPrefix(p1_, outer, lx));
      Formula native = w1_->parseAtomicFormula(lx);
      return embedWorldFormula(*this, 1, native);
    } catch (const ParseError& e1) {
      lx.rewind(m);
      // report the attempt that got further
      if (e0.position >= e1.position) throw e0;
      throw e1;
    }
  }
}

Program CombinedTheory::parseProgram(Lexer& lx) const {
  auto m = lx.mark();
  Lexer::IdentTransform outer = lx.identTransform;
  try {
    TransformGuard g(lx, stripPrefix(p0_, outer, lx));
    Program native = w0_->parseProgram(lx);
    return wrapWorldProgram(0, native);
  } catch (const ParseError& e0) {
    lx.rewind(m);
    try {
      TransformGuard g(lx, stripPrefix(p1_, outer, lx));
      Program native = w1_->parseProgram(lx);
      return wrapWorldProgram(1, native);
    } catch (const ParseError& e1) {
      lx.rewind(m);
      if (e0.position >= e1.position) throw e0;
      throw e1;
    }
  }
}

TheoryPtr combine(TheoryPtr t0, TheoryPtr t1, std::vector<HeteroAtom> couplings,
                  std::string prefix0, std::string prefix1) {
  return std::make_shared<CombinedTheory>(std::move(t0), std::move(t1),
                                          std::move(couplings),
                                          std::move(prefix0),
                                          std::move(prefix1));
}

TheoryPtr fullHetero(TheoryPtr t0, TheoryPtr t1,
                     std::vector<HeteroAtom> couplings, std::string prefix0,
                     std::string prefix1) {
  return liftRegular(liftHavoc(combine(std::move(t0), std::move(t1),
                                       std::move(couplings), std::move(prefix0),
                                       std::move(prefix1))));
}

const CombinedTheory* combinedOf(const Theory& th) {
  const Theory* cur = &th;
  while (cur) {
    if (const auto* c = dynamic_cast<const CombinedTheory*>(cur)) return c;
    cur = cur->base();
  }
  return nullptr;
}

namespace {

// Chain of lift theories from the combined core up to `top` (outermost last).
std::vector<const Theory*> liftChain(const Theory& top, const Theory& stopAt) {
  std::vector<const Theory*> chain;
  const Theory* cur = &top;
  while (cur && cur != &stopAt) {
    chain.push_back(cur);
    cur = cur->base();
  }
  std::reverse(chain.begin(), chain.end());
  return chain;
}

}  // namespace

Program embedWorldProgram(const Theory& th, int i, const Program& worldProgram) {
  const CombinedTheory* ct = combinedOf(th);
  if (!ct) throw TheoryError(th.describe() + " is not built over a combination");
  Program p = ct->wrapWorldProgram(i, worldProgram);
  for (const Theory* lift : liftChain(th, *ct)) {
    auto e = lift->embedProgramFromBase(p);
    if (!e) throw TheoryError("embedding failed through " + lift->describe());
    p = *e;
  }
  return p;
}

Formula embedWorldFormula(const Theory& th, int i, const Formula& f) {
  const CombinedTheory* ct = combinedOf(th);
  if (!ct) throw TheoryError(th.describe() + " is not built over a combination");
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return Formula::atom(ct->wrapWorldAtom(i, f.atomPayload()));
    case Formula::Kind::Not:
      return Formula::mkNot(embedWorldFormula(th, i, f.child()));
    case Formula::Kind::And:
      return Formula::mkAnd(embedWorldFormula(th, i, f.left()),
                            embedWorldFormula(th, i, f.right()));
    case Formula::Kind::Forall:
      return Formula::forall(ct->prefixVar(i, f.boundVar()),
                             embedWorldFormula(th, i, f.child()));
    case Formula::Kind::Box:
      return Formula::box(embedWorldProgram(th, i, f.program()),
                          embedWorldFormula(th, i, f.child()));
  }
  throw TheoryError("embedWorldFormula: bad formula");
}

namespace {

bool programPureWorldRec(const Theory& th, const Program& p, int i,
                         std::string* offender);

bool varPure(const CombinedTheory& ct, VarId v, int i, std::string* offender) {
  if (ct.varWorldOf(v) == i) return true;
  if (offender) *offender = "variable " + v.name();
  return false;
}

bool formulaPureWorldRec(const Theory& th, const Formula& f, int i,
                         std::string* offender) {
  const CombinedTheory* ct = combinedOf(th);
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      const Atom& a = f.atomPayload();
      // Peek through to the combined layer's payload.
      if (const auto* wa = a.as<WorldAtomP>()) {
        if (wa->world == i) return true;
        if (offender) {
          std::ostringstream os;
          th.printAtom(os, a);
          *offender = "atom " + os.str();
        }
        return false;
      }
      if (offender) {
        std::ostringstream os;
        th.printAtom(os, a);
        *offender = "atom " + os.str();
      }
      return false;  // couplings span both worlds
    }
    case Formula::Kind::Not:
      return formulaPureWorldRec(th, f.child(), i, offender);
    case Formula::Kind::And:
      return formulaPureWorldRec(th, f.left(), i, offender) &&
             formulaPureWorldRec(th, f.right(), i, offender);
    case Formula::Kind::Forall:
      return varPure(*ct, f.boundVar(), i, offender) &&
             formulaPureWorldRec(th, f.child(), i, offender);
    case Formula::Kind::Box:
      return programPureWorldRec(th, f.program(), i, offender) &&
             formulaPureWorldRec(th, f.child(), i, offender);
  }
  return false;
}

bool programPureWorldRec(const Theory& th, const Program& p, int i,
                         std::string* offender) {
  const CombinedTheory* ct = combinedOf(th);
  if (const auto* rp = asRegularProg(th, p)) {
    switch (rp->tag) {
      case RegularProg::Tag::Base:
        return programPureWorldRec(*th.base(), rp->basePgm, i, offender);
      case RegularProg::Tag::Test:
        return formulaPureWorldRec(th, rp->testFml, i, offender);
      case RegularProg::Tag::Star:
        return programPureWorldRec(
            th, Program::make<RegularProg>(th.id(), *rp->p), i, offender);
      case RegularProg::Tag::Seq:
      case RegularProg::Tag::Choice:
        return programPureWorldRec(th, Program::make<RegularProg>(th.id(), *rp->p),
                                   i, offender) &&
               programPureWorldRec(th, Program::make<RegularProg>(th.id(), *rp->q),
                                   i, offender);
    }
  }
  if (const auto* hp = asHavocProg(th, p)) {
    if (hp->isHavoc) return varPure(*ct, hp->var, i, offender);
    return programPureWorldRec(*th.base(), hp->basePgm, i, offender);
  }
  if (const auto* wp = p.as<WorldProgP>()) {
    if (wp->world == i) return true;
    if (offender) {
      std::ostringstream os;
      th.printProgram(os, p);
      *offender = "program " + os.str();
    }
    return false;
  }
  if (offender) *offender = "program of unknown shape";
  return false;
}

}  // namespace

bool formulaPureWorld(const Theory& th, const Formula& f, int i,
                      std::string* offender) {
  if (!combinedOf(th))
    throw TheoryError(th.describe() + " is not built over a combination");
  return formulaPureWorldRec(th, f, i, offender);
}

bool programPureWorld(const Theory& th, const Program& p, int i,
                      std::string* offender) {
  if (!combinedOf(th))
    throw TheoryError(th.describe() + " is not built over a combination");
  return programPureWorldRec(th, p, i, offender);
}

std::shared_ptr<const InductiveExpressivity> heteroInductiveInstance(
    int side, const Theory& th) {
  const CombinedTheory* ct = combinedOf(th);
  if (!ct) throw TheoryError(th.describe() + " is not built over a combination");
  const Theory* w = ct->world(side);
  auto base = w->inductive();
  if (!base) {
    // fall back to the other side per the combined-theory contract
    throw TheoryError("world " + std::to_string(side) + " of " + th.describe() +
                      " is not inductively expressive");
  }
  auto self = std::static_pointer_cast<const CombinedTheory>(
      ct->shared_from_this());
  auto ind = std::make_shared<InductiveExpressivity>();
  for (VarId v : base->countingPool)
    ind->countingPool.push_back(self->prefixVar(side, v));
  ind->isCountingVar = [self, base, side](VarId v) {
    return self->varWorldOf(v) == side &&
           base->isCountingVar(self->nativeVar(v));
  };
  ind->u2n = base->u2n;
  ind->natGt0 = [self, base, side](VarId v) {
    return embedWorldFormula(*self, side, base->natGt0(self->nativeVar(v)));
  };
  ind->natEq = [self, base, side](VarId v, VarId w2) {
    return embedWorldFormula(
        *self, side, base->natEq(self->nativeVar(v), self->nativeVar(w2)));
  };
  ind->natPlus1 = [self, base, side](VarId v, VarId w2) {
    return embedWorldFormula(
        *self, side, base->natPlus1(self->nativeVar(v), self->nativeVar(w2)));
  };
  return ind;
}

}  // namespace dynth
