// The modal formula language shared by all dynamic theories: atoms and
// programs are opaque per-theory payloads; the connective layer (negation,
// conjunction, universal quantifier, box) is fixed. Derived connectives
// expand to the core five at construction time.

#ifndef DYNTH_FORMULA_HPP_
#define DYNTH_FORMULA_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynth/symbols.hpp"

namespace dynth {

using TheoryId = std::uint64_t;

namespace detail {

template <typename T>
struct PayloadOps {
  static bool eq(const void* a, const void* b) {
    return *static_cast<const T*>(a) == *static_cast<const T*>(b);
  }
};

struct ErasedPayload {
  std::shared_ptr<const void> data;
  bool (*eq)(const void*, const void*) = nullptr;
  const void* typeTag = nullptr;  // one address per payload type
  TheoryId signature = 0;

  template <typename T>
  static const void* tagOf() {
    static const char tag = 0;
    return &tag;
  }

  template <typename T>
  static ErasedPayload make(TheoryId sig, T value) {
    ErasedPayload p;
    p.data = std::make_shared<const T>(std::move(value));
    p.eq = &PayloadOps<T>::eq;
    p.typeTag = tagOf<T>();
    p.signature = sig;
    return p;
  }

  template <typename T>
  const T* as() const {
    if (typeTag != tagOf<T>()) return nullptr;
    return static_cast<const T*>(data.get());
  }

  bool structurallyEqual(const ErasedPayload& o) const {
    if (data == o.data) return true;
    if (typeTag != o.typeTag || signature != o.signature) return false;
    return eq(data.get(), o.data.get());
  }

  explicit operator bool() const { return data != nullptr; }
};

}  // namespace detail

class Atom {
 public:
  Atom() = default;
  template <typename T>
  static Atom make(TheoryId sig, T payload) {
    Atom a;
    a.p_ = detail::ErasedPayload::make<T>(sig, std::move(payload));
    return a;
  }
  template <typename T>
  const T* as() const {
    return p_.as<T>();
  }
  TheoryId signature() const { return p_.signature; }
  bool structurallyEqual(const Atom& o) const {
    return p_.structurallyEqual(o.p_);
  }
  explicit operator bool() const { return bool(p_); }

 private:
  detail::ErasedPayload p_;
};

class Program {
 public:
  Program() = default;
  template <typename T>
  static Program make(TheoryId sig, T payload) {
    Program p;
    p.p_ = detail::ErasedPayload::make<T>(sig, std::move(payload));
    return p;
  }
  template <typename T>
  const T* as() const {
    return p_.as<T>();
  }
  TheoryId signature() const { return p_.signature; }
  bool structurallyEqual(const Program& o) const {
    return p_.structurallyEqual(o.p_);
  }
  explicit operator bool() const { return bool(p_); }

 private:
  detail::ErasedPayload p_;
};

class Formula {
 public:
  enum class Kind : std::uint8_t { Atom, Not, And, Forall, Box };

  Formula() = default;

  // Core constructors.
  static Formula atom(Atom a);
  static Formula mkNot(Formula f);
  static Formula mkAnd(Formula f, Formula g);
  static Formula forall(VarId v, Formula f);
  static Formula box(Program p, Formula f);

  // Derived constructors; these expand into the core five.
  static Formula diamond(Program p, Formula f);  // !([p] !f)
  static Formula mkOr(Formula f, Formula g);     // !(!f & !g)
  static Formula implies(Formula f, Formula g);  // !(f & !g)
  static Formula iff(Formula f, Formula g);      // (f -> g) & (g -> f)
  static Formula exists(VarId v, Formula f);     // !(forall v. !f)

  Kind kind() const { return n_->kind; }
  const Atom& atomPayload() const { return n_->atom; }
  Formula child() const { return Formula(n_->a); }   // Not, Forall, Box
  Formula left() const { return Formula(n_->a); }    // And
  Formula right() const { return Formula(n_->b); }   // And
  VarId boundVar() const { return n_->var; }         // Forall
  const Program& program() const { return n_->prog; }  // Box

  bool valid() const { return n_ != nullptr; }
  bool structurallyEqual(const Formula& o) const;
  bool isModalityFree() const;

  // Pattern views used by the printer and kernel; they detect the expanded
  // shapes of the derived connectives.
  std::optional<std::pair<Formula, Formula>> asImplies() const;
  std::optional<std::pair<Formula, Formula>> asIff() const;
  std::optional<std::pair<Formula, Formula>> asOr() const;
  std::optional<std::pair<Program, Formula>> asDiamond() const;
  std::optional<std::pair<VarId, Formula>> asExists() const;

 private:
  struct Node {
    Kind kind;
    Atom atom;
    std::shared_ptr<const Node> a, b;
    VarId var;
    Program prog;
  };
  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

}  // namespace dynth

#endif  // DYNTH_FORMULA_HPP_
