#include "dynth/formula.hpp"

namespace dynth {

Formula Formula::atom(Atom a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->atom = std::move(a);
  return Formula(n);
}

Formula Formula::mkNot(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->a = f.n_;
  return Formula(n);
}

Formula Formula::mkAnd(Formula f, Formula g) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->a = f.n_;
  n->b = g.n_;
  return Formula(n);
}

Formula Formula::forall(VarId v, Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Forall;
  n->var = v;
  n->a = f.n_;
  return Formula(n);
}

Formula Formula::box(Program p, Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Box;
  n->prog = std::move(p);
  n->a = f.n_;
  return Formula(n);
}

Formula Formula::diamond(Program p, Formula f) {
  return mkNot(box(std::move(p), mkNot(std::move(f))));
}

Formula Formula::mkOr(Formula f, Formula g) {
  return mkNot(mkAnd(mkNot(std::move(f)), mkNot(std::move(g))));
}

Formula Formula::implies(Formula f, Formula g) {
  return mkNot(mkAnd(std::move(f), mkNot(std::move(g))));
}

Formula Formula::iff(Formula f, Formula g) {
  return mkAnd(implies(f, g), implies(g, f));
}

Formula Formula::exists(VarId v, Formula f) {
  return mkNot(forall(v, mkNot(std::move(f))));
}

bool Formula::structurallyEqual(const Formula& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  if (n_->kind != o.n_->kind) return false;
  switch (n_->kind) {
    case Kind::Atom:
      return n_->atom.structurallyEqual(o.n_->atom);
    case Kind::Not:
      return child().structurallyEqual(o.child());
    case Kind::And:
      return left().structurallyEqual(o.left()) &&
             right().structurallyEqual(o.right());
    case Kind::Forall:
      return n_->var == o.n_->var && child().structurallyEqual(o.child());
    case Kind::Box:
      return n_->prog.structurallyEqual(o.n_->prog) &&
             child().structurallyEqual(o.child());
  }
  return false;
}

bool Formula::isModalityFree() const {
  switch (kind()) {
    case Kind::Atom:
      return true;
    case Kind::Not:
    case Kind::Forall:
      return child().isModalityFree();
    case Kind::And:
      return left().isModalityFree() && right().isModalityFree();
    case Kind::Box:
      return false;
  }
  return false;
}

std::optional<std::pair<Formula, Formula>> Formula::asImplies() const {
  // f -> g  ==  !(f & !g)
  if (kind() != Kind::Not) return std::nullopt;
  Formula c = child();
  if (c.kind() != Kind::And) return std::nullopt;
  Formula r = c.right();
  if (r.kind() != Kind::Not) return std::nullopt;
  return std::make_pair(c.left(), r.child());
}

std::optional<std::pair<Formula, Formula>> Formula::asIff() const {
  if (kind() != Kind::And) return std::nullopt;
  auto fwd = left().asImplies();
  auto bwd = right().asImplies();
  if (!fwd || !bwd) return std::nullopt;
  if (fwd->first.structurallyEqual(bwd->second) &&
      fwd->second.structurallyEqual(bwd->first))
    return std::make_pair(fwd->first, fwd->second);
  return std::nullopt;
}

std::optional<std::pair<Formula, Formula>> Formula::asOr() const {
  // f | g  ==  !(!f & !g)
  if (kind() != Kind::Not) return std::nullopt;
  Formula c = child();
  if (c.kind() != Kind::And) return std::nullopt;
  if (c.left().kind() != Kind::Not || c.right().kind() != Kind::Not)
    return std::nullopt;
  return std::make_pair(c.left().child(), c.right().child());
}

std::optional<std::pair<Program, Formula>> Formula::asDiamond() const {
  // <p> f  ==  !([p] !f)
  if (kind() != Kind::Not) return std::nullopt;
  Formula c = child();
  if (c.kind() != Kind::Box) return std::nullopt;
  Formula b = c.child();
  if (b.kind() != Kind::Not) return std::nullopt;
  return std::make_pair(c.program(), b.child());
}

std::optional<std::pair<VarId, Formula>> Formula::asExists() const {
  // exists v. f  ==  !(forall v. !f)
  if (kind() != Kind::Not) return std::nullopt;
  Formula c = child();
  if (c.kind() != Kind::Forall) return std::nullopt;
  Formula b = c.child();
  if (b.kind() != Kind::Not) return std::nullopt;
  return std::make_pair(c.boundVar(), b.child());
}

}  // namespace dynth
