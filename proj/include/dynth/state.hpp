// Finite-support states: a finite map from variables to values over a
// default. Entries equal to the default are never stored, so extensionally
// equal states are identical values.

#ifndef DYNTH_STATE_HPP_
#define DYNTH_STATE_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dynth/symbols.hpp"

namespace dynth {

using Value = std::int64_t;

class State {
 public:
  State() = default;
  explicit State(Value defaultValue) : default_(defaultValue) {}

  Value get(VarId v) const;
  State with(VarId v, Value val) const;  // functional update
  void set(VarId v, Value val);
  Value defaultValue() const { return default_; }

  // Variables currently stored (those differing from the default).
  const std::vector<std::pair<VarId, Value>>& support() const {
    return entries_;
  }

  bool equalOn(const State& o, const VarSetBase& vars) const;
  // Equal on the complement of `excluded`: compares defaults and every
  // support entry outside `excluded`.
  bool equalOnComplement(const State& o, const VarSetBase& excluded) const;
  bool equalOn(const State& o, const VarSet& vs) const {
    return vs.complemented ? equalOnComplement(o, vs.vars)
                           : equalOn(o, vs.vars);
  }

  bool operator==(const State& o) const {
    return default_ == o.default_ && entries_ == o.entries_;
  }
  bool operator<(const State& o) const;

  std::string str() const;  // "{v=1, w=-2}"

 private:
  std::vector<std::pair<VarId, Value>> entries_;  // sorted by VarId
  Value default_ = 0;
};

}  // namespace dynth

#endif  // DYNTH_STATE_HPP_
