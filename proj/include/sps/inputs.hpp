// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Program inputs and the indistinguishability policy (phi): which variables
// and memory regions an observer may already know. Two inputs are related
// when they agree on everything public and both satisfy the constraints.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "sps/ast.hpp"
#include "sps/eval.hpp"

namespace sps {

struct Input {
  std::map<std::string, Value> vars;
  std::map<Int, Value> mem;

  friend bool operator==(const Input& a, const Input& b) {
    return a.vars == b.vars && a.mem == b.mem;
  }
};

struct MemRange {
  Int lo, hi;  // [lo, hi)
};

struct PhiSpec {
  std::vector<std::string> public_vars;
  std::vector<MemRange> public_mem;
  std::vector<ExprPtr> constraints;        // boolean expressions over input variables
  std::vector<std::string> constraint_texts;  // original spellings, kept for serialization

  bool var_is_public(const std::string& name) const;
  bool mem_is_public(const Int& addr) const;
  bool constraints_hold(const Input& in) const;
  bool publics_agree(const Input& a, const Input& b) const;
  bool related(const Input& a, const Input& b) const;
};

}  // namespace sps
