#include "dynth/state.hpp"

#include <algorithm>
#include <sstream>

namespace dynth {

namespace {
auto lookup(const std::vector<std::pair<VarId, Value>>& es, VarId v) {
  return std::lower_bound(
      es.begin(), es.end(), v,
      [](const std::pair<VarId, Value>& e, VarId k) { return e.first < k; });
}
}  // namespace

Value State::get(VarId v) const {
  auto it = lookup(entries_, v);
  if (it != entries_.end() && it->first == v) return it->second;
  return default_;
}

void State::set(VarId v, Value val) {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), v,
      [](const std::pair<VarId, Value>& e, VarId k) { return e.first < k; });
  bool present = it != entries_.end() && it->first == v;
  if (val == default_) {
    if (present) entries_.erase(it);
    return;
  }
  if (present)
    it->second = val;
  else
    entries_.insert(it, {v, val});
}

State State::with(VarId v, Value val) const {
  State s = *this;
  s.set(v, val);
  return s;
}

bool State::equalOn(const State& o, const VarSetBase& vars) const {
  for (VarId v : vars)
    if (get(v) != o.get(v)) return false;
  return true;
}

bool State::equalOnComplement(const State& o, const VarSetBase& excluded) const {
  if (default_ != o.default_) return false;
  for (const auto& [v, val] : entries_)
    if (!excluded.contains(v) && o.get(v) != val) return false;
  for (const auto& [v, val] : o.entries_)
    if (!excluded.contains(v) && get(v) != val) return false;
  return true;
}

bool State::operator<(const State& o) const {
  if (default_ != o.default_) return default_ < o.default_;
  return entries_ < o.entries_;
}

std::string State::str() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [v, val] : entries_) {
    if (!first) os << ", ";
    os << v.name() << '=' << val;
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace dynth
