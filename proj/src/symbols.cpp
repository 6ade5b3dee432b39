#include "dynth/symbols.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace dynth {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::map<std::pair<std::string, int>, std::uint32_t> ids;
  std::vector<std::pair<std::string, int>> entries{{"", -1}};  // id 0 reserved

  static SymbolTable& instance() {
    static SymbolTable t;
    return t;
  }
};

}  // namespace

VarId VarId::intern(const std::string& name, int world) {
  auto& t = SymbolTable::instance();
  std::lock_guard<std::mutex> lock(t.mu);
  auto key = std::make_pair(name, world);
  auto it = t.ids.find(key);
  if (it != t.ids.end()) return VarId(it->second);
  auto id = static_cast<std::uint32_t>(t.entries.size());
  t.entries.push_back(key);
  t.ids.emplace(std::move(key), id);
  return VarId(id);
}

const std::string& VarId::name() const {
  return SymbolTable::instance().entries[id_].first;
}

int VarId::world() const { return SymbolTable::instance().entries[id_].second; }

VarSetBase::VarSetBase(std::vector<VarId> vs) : vars_(std::move(vs)) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

bool VarSetBase::contains(VarId v) const {
  return std::binary_search(vars_.begin(), vars_.end(), v);
}

void VarSetBase::insert(VarId v) {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
  if (it == vars_.end() || *it != v) vars_.insert(it, v);
}

void VarSetBase::unite(const VarSetBase& o) {
  for (VarId v : o) insert(v);
}

void VarSetBase::erase(VarId v) {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
  if (it != vars_.end() && *it == v) vars_.erase(it);
}

VarSetBase VarSetBase::intersect(const VarSetBase& o) const {
  VarSetBase r;
  std::set_intersection(vars_.begin(), vars_.end(), o.vars_.begin(),
                        o.vars_.end(), std::back_inserter(r.vars_));
  return r;
}

VarSetBase VarSetBase::minus(const VarSetBase& o) const {
  VarSetBase r;
  std::set_difference(vars_.begin(), vars_.end(), o.vars_.begin(),
                      o.vars_.end(), std::back_inserter(r.vars_));
  return r;
}

bool VarSetBase::supersetOf(const VarSetBase& o) const {
  return std::includes(vars_.begin(), vars_.end(), o.vars_.begin(),
                       o.vars_.end());
}

std::string VarSetBase::str() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (VarId v : vars_) {
    if (!first) os << ", ";
    os << v.name();
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace dynth
