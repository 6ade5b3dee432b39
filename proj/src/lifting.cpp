#include "dynth/lifting.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "dynth/parser.hpp"

namespace dynth {

bool RegularProg::operator==(const RegularProg& o) const {
  if (tag != o.tag) return false;
  switch (tag) {
    case Tag::Base:
      return basePgm.structurallyEqual(o.basePgm);
    case Tag::Test:
      return testFml.structurallyEqual(o.testFml);
    case Tag::Star:
      return *p == *o.p;
    case Tag::Seq:
    case Tag::Choice:
      return *p == *o.p && *q == *o.q;
  }
  return false;
}

namespace {

// ---------------------------------------------------------------------------
// Havoc lift

class HavocTheory final : public Theory {
 public:
  explicit HavocTheory(TheoryPtr base) : base_(std::move(base)) {}

  std::string describe() const override {
    return "havoc(" + base_->describe() + ")";
  }
  Kind kind() const override { return Kind::HavocLift; }
  const Theory* base() const override { return base_.get(); }

  bool ownsAtom(const Atom& a) const override { return base_->ownsAtom(a); }
  bool ownsProgram(const Program& p) const override {
    return p.as<HavocProg>() != nullptr && p.signature() == id();
  }
  bool ownsVar(VarId v) const override { return base_->ownsVar(v); }
  std::vector<VarId> varPool() const override { return base_->varPool(); }
  VarId internVar(const std::string& name) const override {
    return base_->internVar(name);
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
    const HavocProg* hp = view(p);
    if (!hp->isHavoc) return base_->progSucc(s, hp->basePgm, b);
    SuccessorSet out;
    for (Value val : base_->valueWindow(hp->var, b))
      out.states.push_back(s.with(hp->var, val));
    out.truncated = !base_->windowExhaustive(hp->var, b);
    return out;
  }
  VarSetBase progFv(const Program& p) const override {
    const HavocProg* hp = view(p);
    return hp->isHavoc ? VarSetBase{} : base_->progFv(hp->basePgm);
  }
  VarSetBase progBv(const Program& p) const override {
    const HavocProg* hp = view(p);
    return hp->isHavoc ? VarSetBase{hp->var} : base_->progBv(hp->basePgm);
  }

  bool renamable() const override { return base_->renamable(); }
  std::optional<Atom> renameAtomVar(const Atom& a, VarId from,
                                    VarId to) const override {
    return base_->renameAtomVar(a, from, to);
  }
  std::optional<Program> renameProgramVar(const Program& p, VarId from,
                                          VarId to) const override {
    const HavocProg* hp = view(p);
    if (hp->isHavoc) {
      HavocProg r = *hp;
      if (r.var == from) r.var = to;
      return Program::make(id(), r);
    }
    auto rb = base_->renameProgramVar(hp->basePgm, from, to);
    if (!rb) return std::nullopt;
    return Program::make(id(), HavocProg{false, *rb, VarId()});
  }
  std::optional<Formula> eqPredicate(VarId v, VarId w) const override {
    return base_->eqPredicate(v, w);
  }
  std::shared_ptr<const InductiveExpressivity> inductive() const override {
    return base_->inductive();
  }
  std::optional<Program> havocProgram(VarId v) const override {
    return Program::make(id(), HavocProg{true, Program(), v});
  }
  std::optional<Program> embedProgramFromBase(const Program& p) const override {
    if (!base_->ownsProgram(p)) return std::nullopt;
    return Program::make(id(), HavocProg{false, p, VarId()});
  }
  std::optional<Formula> verum() const override { return base_->verum(); }

  State sampleState(Rng& rng, const EvalBudget& b) const override {
    return base_->sampleState(rng, b);
  }
  Atom sampleAtom(Rng& rng) const override { return base_->sampleAtom(rng); }
  Program sampleProgram(Rng& rng, int depth) const override {
    auto pool = varPool();
    if (!pool.empty() && rng.chance(0.4)) return *havocProgram(rng.pick(pool));
    return *embedProgramFromBase(base_->sampleProgram(rng, depth));
  }

  void printAtomMapped(std::ostream& os, const Atom& a,
                       const IdentMapper& m) const override {
    base_->printAtomMapped(os, a, m);
  }
  void printProgramMapped(std::ostream& os, const Program& p,
                          const IdentMapper& m) const override {
    const HavocProg* hp = view(p);
    if (hp->isHavoc)
      os << (m ? m(hp->var.name()) : hp->var.name()) << " := *";
    else
      base_->printProgramMapped(os, hp->basePgm, m);
  }
  void printValue(std::ostream& os, VarId v, Value val) const override {
    base_->printValue(os, v, val);
  }
  Formula parseAtomicFormula(Lexer& lx) const override {
    return base_->parseAtomicFormula(lx);
  }
  Program parseProgram(Lexer& lx) const override {
    // `v := *` is ours; anything else belongs to the base.
    auto m = lx.mark();
    if (lx.peek().kind == Token::Kind::Ident) {
      Token ident = lx.next();
      if (lx.accept(":=") && lx.accept("*"))
        return *havocProgram(internVar(lx.transformed(ident.text)));
      lx.rewind(m);
    }
    return *embedProgramFromBase(base_->parseProgram(lx));
  }

  const HavocProg* view(const Program& p) const {
    const HavocProg* hp = p.as<HavocProg>();
    if (!hp || p.signature() != id())
      throw TheoryError("program does not belong to " + describe());
    return hp;
  }

 private:
  TheoryPtr base_;
};

// ---------------------------------------------------------------------------
// Regular closure

class RegularTheory final : public Theory {
 public:
  explicit RegularTheory(TheoryPtr base) : base_(std::move(base)) {}

  std::string describe() const override {
    return "regular(" + base_->describe() + ")";
  }
  Kind kind() const override { return Kind::RegularLift; }
  const Theory* base() const override { return base_.get(); }

  bool ownsAtom(const Atom& a) const override { return base_->ownsAtom(a); }
  bool ownsProgram(const Program& p) const override {
    return p.as<RegularProg>() != nullptr && p.signature() == id();
  }
  bool ownsVar(VarId v) const override { return base_->ownsVar(v); }
  std::vector<VarId> varPool() const override { return base_->varPool(); }
  VarId internVar(const std::string& name) const override {
    return base_->internVar(name);
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
    return succ(s, *view(p), b);
  }

  VarSetBase progFv(const Program& p) const override { return fv(*view(p)); }
  VarSetBase progBv(const Program& p) const override { return bv(*view(p)); }

  bool renamable() const override { return base_->renamable(); }
  std::optional<Atom> renameAtomVar(const Atom& a, VarId from,
                                    VarId to) const override {
    return base_->renameAtomVar(a, from, to);
  }
  std::optional<Formula> eqPredicate(VarId v, VarId w) const override {
    return base_->eqPredicate(v, w);
  }
  std::shared_ptr<const InductiveExpressivity> inductive() const override {
    return base_->inductive();
  }
  std::optional<Program> havocProgram(VarId v) const override {
    auto hp = base_->havocProgram(v);
    if (!hp) return std::nullopt;
    return embedProgramFromBase(*hp);
  }
  bool regularLifted() const override { return true; }
  std::optional<Program> embedProgramFromBase(const Program& p) const override {
    if (!base_->ownsProgram(p)) return std::nullopt;
    RegularProg r;
    r.tag = RegularProg::Tag::Base;
    r.basePgm = p;
    return Program::make(id(), r);
  }
  std::optional<Formula> verum() const override { return base_->verum(); }

  State sampleState(Rng& rng, const EvalBudget& b) const override {
    return base_->sampleState(rng, b);
  }
  Atom sampleAtom(Rng& rng) const override { return base_->sampleAtom(rng); }
  Program sampleProgram(Rng& rng, int depth) const override {
    if (depth <= 0 || rng.chance(0.45))
      return *embedProgramFromBase(base_->sampleProgram(rng, depth));
    switch (rng.range(0, 3)) {
      case 0:
        return mk(RegularProg{RegularProg::Tag::Seq, Program(),
                              viewPtr(sampleProgram(rng, depth - 1)),
                              viewPtr(sampleProgram(rng, depth - 1)),
                              Formula()});
      case 1:
        return mk(RegularProg{RegularProg::Tag::Choice, Program(),
                              viewPtr(sampleProgram(rng, depth - 1)),
                              viewPtr(sampleProgram(rng, depth - 1)),
                              Formula()});
      case 2: {
        Formula guard = Formula::atom(sampleAtom(rng));
        if (rng.chance(0.3)) guard = Formula::mkNot(guard);
        return mk(RegularProg{RegularProg::Tag::Test, Program(), nullptr,
                              nullptr, guard});
      }
      default:
        return mk(RegularProg{RegularProg::Tag::Star, Program(),
                              viewPtr(sampleProgram(rng, depth - 1)), nullptr,
                              Formula()});
    }
  }

  void printAtomMapped(std::ostream& os, const Atom& a,
                       const IdentMapper& m) const override {
    base_->printAtomMapped(os, a, m);
  }
  void printProgramMapped(std::ostream& os, const Program& p,
                          const IdentMapper& m) const override;
  void printValue(std::ostream& os, VarId v, Value val) const override {
    base_->printValue(os, v, val);
  }
  Formula parseAtomicFormula(Lexer& lx) const override {
    return base_->parseAtomicFormula(lx);
  }
  Program parseProgram(Lexer& lx) const override {
    return *embedProgramFromBase(base_->parseProgram(lx));
  }

  Program mk(RegularProg r) const { return Program::make(id(), std::move(r)); }
  std::shared_ptr<const RegularProg> viewPtr(const Program& p) const {
    return std::make_shared<RegularProg>(*view(p));
  }
  const RegularProg* view(const Program& p) const {
    const RegularProg* rp = p.as<RegularProg>();
    if (!rp || p.signature() != id())
      throw TheoryError("program does not belong to " + describe());
    return rp;
  }

 private:
  SuccessorSet succ(const State& s, const RegularProg& r,
                    const EvalBudget& b) const {
    switch (r.tag) {
      case RegularProg::Tag::Base:
        return base_->progSucc(s, r.basePgm, b);
      case RegularProg::Tag::Test: {
        Verdict v = evalFormula(*this, s, r.testFml, b);
        SuccessorSet out;
        if (v == Verdict::True)
          out.states.push_back(s);
        else if (v == Verdict::Unknown)
          out.truncated = true;
        return out;
      }
      case RegularProg::Tag::Seq: {
        SuccessorSet mid = succ(s, *r.p, b);
        SuccessorSet out;
        out.truncated = mid.truncated;
        std::set<State> seen;
        for (const State& m : mid.states) {
          SuccessorSet fin = succ(m, *r.q, b);
          out.truncated = out.truncated || fin.truncated;
          for (State& t : fin.states)
            if (seen.insert(t).second) out.states.push_back(std::move(t));
          if (out.states.size() > b.succCap) {
            out.truncated = true;
            break;
          }
        }
        return out;
      }
      case RegularProg::Tag::Choice: {
        SuccessorSet a = succ(s, *r.p, b);
        SuccessorSet c = succ(s, *r.q, b);
        std::set<State> seen(a.states.begin(), a.states.end());
        for (State& t : c.states)
          if (seen.insert(t).second) a.states.push_back(std::move(t));
        a.truncated = a.truncated || c.truncated;
        return a;
      }
      case RegularProg::Tag::Star: {
        // Union of all finite unrollings; exact whenever the chain
        // stabilizes, depth-bounded otherwise.
        SuccessorSet out;
        std::set<State> visited{s};
        std::deque<State> frontier{s};
        bool exact = false;
        int depthLimit = finiteEnumerable() ? (1 << 20) : b.starDepth;
        for (int depth = 0; depth < depthLimit; ++depth) {
          std::deque<State> next;
          for (const State& m : frontier) {
            SuccessorSet step = succ(m, *r.p, b);
            out.truncated = out.truncated || step.truncated;
            for (State& t : step.states)
              if (visited.insert(t).second) next.push_back(std::move(t));
          }
          if (next.empty()) {
            exact = true;
            break;
          }
          if (visited.size() > b.succCap) break;
          frontier = std::move(next);
        }
        if (!exact) out.truncated = true;
        out.states.assign(visited.begin(), visited.end());
        return out;
      }
    }
    return {};
  }

  VarSetBase fv(const RegularProg& r) const {
    switch (r.tag) {
      case RegularProg::Tag::Base:
        return base_->progFv(r.basePgm);
      case RegularProg::Tag::Test:
        return fvSyn(*this, r.testFml);
      case RegularProg::Tag::Star:
        return fv(*r.p);
      case RegularProg::Tag::Seq:
      case RegularProg::Tag::Choice: {
        VarSetBase s = fv(*r.p);
        s.unite(fv(*r.q));
        return s;
      }
    }
    return {};
  }

  VarSetBase bv(const RegularProg& r) const {
    switch (r.tag) {
      case RegularProg::Tag::Base:
        return base_->progBv(r.basePgm);
      case RegularProg::Tag::Test:
        return {};
      case RegularProg::Tag::Star:
        return bv(*r.p);
      case RegularProg::Tag::Seq:
      case RegularProg::Tag::Choice: {
        VarSetBase s = bv(*r.p);
        s.unite(bv(*r.q));
        return s;
      }
    }
    return {};
  }

 public:
  std::optional<Program> renameProgramVar(const Program& p, VarId from,
                                          VarId to) const override {
    const RegularProg* r = view(p);
    switch (r->tag) {
      case RegularProg::Tag::Base: {
        auto rb = base_->renameProgramVar(r->basePgm, from, to);
        if (!rb) return std::nullopt;
        return embedProgramFromBase(*rb);
      }
      default:
        // Renaming composite regular programs is not needed by the kernel;
        // the substitution layer rejects these shapes before getting here.
        return std::nullopt;
    }
  }

 private:
  TheoryPtr base_;
};

void RegularTheory::printProgramMapped(std::ostream& os, const Program& p,
                                       const IdentMapper& m) const {
  const RegularProg& r = *view(p);
  // precedence: * > ; > ++
  auto printAt = [&](const RegularProg& rp, int minPrec, auto&& self) -> void {
    int prec;
    switch (rp.tag) {
      case RegularProg::Tag::Choice:
        prec = 0;
        break;
      case RegularProg::Tag::Seq:
        prec = 1;
        break;
      default:
        prec = 2;
        break;
    }
    bool paren = prec < minPrec;
    if (paren) os << '(';
    switch (rp.tag) {
      case RegularProg::Tag::Base:
        base_->printProgramMapped(os, rp.basePgm, m);
        break;
      case RegularProg::Tag::Test:
        os << "?(" << printFormula(rp.testFml, *this, m) << ')';
        break;
      case RegularProg::Tag::Star:
        if (rp.p->tag == RegularProg::Tag::Base &&
            !rp.p->basePgm.as<HavocProg>()) {
          // base leaves of one token print without parens; havocs and
          // composites need them
          std::ostringstream probe;
          base_->printProgramMapped(probe, rp.p->basePgm, m);
          std::string s = probe.str();
          if (s.find(' ') == std::string::npos)
            os << s;
          else
            os << '(' << s << ')';
        } else {
          os << '(';
          self(*rp.p, 0, self);
          os << ')';
        }
        os << '*';
        break;
      case RegularProg::Tag::Seq:
        self(*rp.p, 2, self);
        os << "; ";
        self(*rp.q, 1, self);
        break;
      case RegularProg::Tag::Choice:
        self(*rp.p, 0, self);  // ++ associates left
        os << " ++ ";
        self(*rp.q, 1, self);
        break;
    }
    if (paren) os << ')';
  };
  printAt(r, 0, printAt);
}

}  // namespace

TheoryPtr liftHavoc(TheoryPtr base) {
  return std::make_shared<HavocTheory>(std::move(base));
}

TheoryPtr liftRegular(TheoryPtr base) {
  return std::make_shared<RegularTheory>(std::move(base));
}

namespace {
const RegularTheory& asRegularTheory(const Theory& th) {
  const auto* rt = dynamic_cast<const RegularTheory*>(&th);
  if (!rt)
    throw TheoryError("operation requires a regular-lifted theory, got " +
                      th.describe());
  return *rt;
}
}  // namespace

Program regBase(const Theory& th, Program baseProgram) {
  auto p = th.embedProgramFromBase(baseProgram);
  if (!p) throw TheoryError("program does not belong to the base of " + th.describe());
  return *p;
}

Program regSeq(const Theory& th, Program p, Program q) {
  const auto& rt = asRegularTheory(th);
  return rt.mk(RegularProg{RegularProg::Tag::Seq, Program(), rt.viewPtr(p),
                           rt.viewPtr(q), Formula()});
}

Program regChoice(const Theory& th, Program p, Program q) {
  const auto& rt = asRegularTheory(th);
  return rt.mk(RegularProg{RegularProg::Tag::Choice, Program(), rt.viewPtr(p),
                           rt.viewPtr(q), Formula()});
}

Program regTest(const Theory& th, Formula f) {
  if (!f.isModalityFree())
    throw TheoryError("test payload must be modality-free");
  checkWellFormed(th, f);
  const auto& rt = asRegularTheory(th);
  return rt.mk(
      RegularProg{RegularProg::Tag::Test, Program(), nullptr, nullptr, f});
}

Program regStar(const Theory& th, Program p) {
  const auto& rt = asRegularTheory(th);
  return rt.mk(RegularProg{RegularProg::Tag::Star, Program(), rt.viewPtr(p),
                           nullptr, Formula()});
}

const HavocProg* asHavocProg(const Theory& havocTh, const Program& p) {
  if (havocTh.kind() != Theory::Kind::HavocLift) return nullptr;
  if (p.signature() != havocTh.id()) return nullptr;
  return p.as<HavocProg>();
}

const RegularProg* asRegularProg(const Theory& regTh, const Program& p) {
  if (!regTh.regularLifted()) return nullptr;
  if (p.signature() != regTh.id()) return nullptr;
  return p.as<RegularProg>();
}

Formula embedFormula(const Formula& baseFormula, const Theory& lifted) {
  const Theory* base = lifted.base();
  if (!base) throw TheoryError("embedFormula: " + lifted.describe() + " is not a lift");
  switch (baseFormula.kind()) {
    case Formula::Kind::Atom:
      return baseFormula;  // atoms are unchanged by lifting
    case Formula::Kind::Not:
      return Formula::mkNot(embedFormula(baseFormula.child(), lifted));
    case Formula::Kind::And:
      return Formula::mkAnd(embedFormula(baseFormula.left(), lifted),
                            embedFormula(baseFormula.right(), lifted));
    case Formula::Kind::Forall:
      return Formula::forall(baseFormula.boundVar(),
                             embedFormula(baseFormula.child(), lifted));
    case Formula::Kind::Box: {
      auto p = lifted.embedProgramFromBase(baseFormula.program());
      if (!p)
        throw TheoryError("embedFormula: program does not belong to the base theory");
      return Formula::box(*p, embedFormula(baseFormula.child(), lifted));
    }
  }
  throw TheoryError("embedFormula: bad formula");
}

Formula unembedFormula(const Formula& f, const Theory& lifted) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return Formula::mkNot(unembedFormula(f.child(), lifted));
    case Formula::Kind::And:
      return Formula::mkAnd(unembedFormula(f.left(), lifted),
                            unembedFormula(f.right(), lifted));
    case Formula::Kind::Forall:
      return Formula::forall(f.boundVar(), unembedFormula(f.child(), lifted));
    case Formula::Kind::Box: {
      const Program& p = f.program();
      Program inner;
      if (const auto* hp = asHavocProg(lifted, p)) {
        if (hp->isHavoc) throw TheoryError("unembed: havoc has no base form");
        inner = hp->basePgm;
      } else if (const auto* rp = asRegularProg(lifted, p)) {
        if (rp->tag != RegularProg::Tag::Base)
          throw TheoryError("unembed: composite regular program has no base form");
        inner = rp->basePgm;
      } else {
        throw TheoryError("unembed: program not owned by " + lifted.describe());
      }
      return Formula::box(inner, unembedFormula(f.child(), lifted));
    }
  }
  throw TheoryError("unembed: bad formula");
}

std::vector<State> starFixpoint(const Theory& th, const Program& p,
                                const State& from) {
  if (!th.finiteEnumerable())
    throw TheoryError("starFixpoint requires a finite-enumerable theory");
  EvalBudget b;
  std::set<State> visited{from};
  std::deque<State> frontier{from};
  while (!frontier.empty()) {
    State s = frontier.front();
    frontier.pop_front();
    for (State& t : th.progSucc(s, p, b).states)
      if (visited.insert(t).second) frontier.push_back(std::move(t));
  }
  return {visited.begin(), visited.end()};
}

std::vector<State> starUnrollings(const Theory& th, const Program& p,
                                  const State& from, int n) {
  EvalBudget b;
  std::set<State> all{from};
  std::set<State> layer{from};
  for (int k = 0; k < n; ++k) {
    std::set<State> next;
    for (const State& s : layer)
      for (State& t : th.progSucc(s, p, b).states) next.insert(std::move(t));
    layer = std::move(next);
    all.insert(layer.begin(), layer.end());
  }
  return {all.begin(), all.end()};
}

}  // namespace dynth
