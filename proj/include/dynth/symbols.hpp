// Interned variable identifiers and finite variable sets.

#ifndef DYNTH_SYMBOLS_HPP_
#define DYNTH_SYMBOLS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace dynth {

// A variable identifier. Interned: equality and ordering are O(1) on the
// intern id. The optional world tag (0 or 1) is set only for variables of
// combined theories; it participates in identity.
class VarId {
 public:
  VarId() : id_(0) {}
  static VarId intern(const std::string& name, int world = -1);

  const std::string& name() const;
  int world() const;  // -1 when not world-tagged

  bool operator==(const VarId& o) const { return id_ == o.id_; }
  bool operator!=(const VarId& o) const { return id_ != o.id_; }
  bool operator<(const VarId& o) const { return id_ < o.id_; }
  std::uint32_t raw() const { return id_; }

 private:
  explicit VarId(std::uint32_t id) : id_(id) {}
  std::uint32_t id_;
};

// Sorted, duplicate-free variable set. Cheap for the small sets that show
// up in fv/bv computations.
class VarSetBase {
 public:
  VarSetBase() = default;
  VarSetBase(std::initializer_list<VarId> vs) { for (VarId v : vs) insert(v); }
  explicit VarSetBase(std::vector<VarId> vs);

  bool contains(VarId v) const;
  void insert(VarId v);
  void unite(const VarSetBase& o);
  void erase(VarId v);
  bool empty() const { return vars_.empty(); }
  std::size_t size() const { return vars_.size(); }
  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }
  const std::vector<VarId>& items() const { return vars_; }

  VarSetBase intersect(const VarSetBase& o) const;
  VarSetBase minus(const VarSetBase& o) const;
  bool disjoint(const VarSetBase& o) const { return intersect(o).empty(); }
  bool supersetOf(const VarSetBase& o) const;

  bool operator==(const VarSetBase& o) const { return vars_ == o.vars_; }

  std::string str() const;  // "{v, w}"

 private:
  std::vector<VarId> vars_;
};

// A finite set of variables or the complement of one (Def: equal-on works
// for both shapes).
struct VarSet {
  VarSetBase vars;
  bool complemented = false;

  static VarSet finite(VarSetBase vs) { return {std::move(vs), false}; }
  static VarSet complementOf(VarSetBase vs) { return {std::move(vs), true}; }
};

}  // namespace dynth

#endif  // DYNTH_SYMBOLS_HPP_
