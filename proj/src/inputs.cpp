// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/inputs.hpp"

#include <algorithm>
#include <set>

namespace sps {

bool PhiSpec::var_is_public(const std::string& name) const {
  return std::find(public_vars.begin(), public_vars.end(), name) != public_vars.end();
}

bool PhiSpec::mem_is_public(const Int& addr) const {
  for (const auto& r : public_mem)
    if (addr >= r.lo && addr < r.hi) return true;
  return false;
}

bool PhiSpec::constraints_hold(const Input& in) const {
  if (constraints.empty()) return true;
  Env rho = in.vars;
  for (const auto& c : constraints) {
    try {
      if (!eval_bool(c, rho)) return false;
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

bool PhiSpec::publics_agree(const Input& a, const Input& b) const {
  for (const auto& name : public_vars)
    if (env_get(a.vars, name) != env_get(b.vars, name)) return false;

  // Memory cells default to 0, so compare the union of the mentioned cells.
  std::set<Int> addrs;
  for (const auto& [k, v] : a.mem) addrs.insert(k);
  for (const auto& [k, v] : b.mem) addrs.insert(k);
  for (const auto& addr : addrs) {
    if (!mem_is_public(addr)) continue;
    auto ia = a.mem.find(addr);
    auto ib = b.mem.find(addr);
    Value va = ia == a.mem.end() ? Value(Int(0)) : ia->second;
    Value vb = ib == b.mem.end() ? Value(Int(0)) : ib->second;
    if (va != vb) return false;
  }
  return true;
}

bool PhiSpec::related(const Input& a, const Input& b) const {
  return publics_agree(a, b) && constraints_hold(a) && constraints_hold(b);
}

}  // namespace sps
