// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Dynamic taint tracking for target programs: a shadow of the sequential
// interpreter that labels every value public or secret and flags any leaked
// value (branch condition, memory address, division operand size) whose
// label is secret.
//
// Labels mirror value structure: scalars carry one bit, lists carry one
// label per element. Taint joins across operators; `?:` joins its condition
// with the arm that was actually taken. Initial labels come from the policy:
// input variables and memory cells outside the public sets are secret, the
// directive list is public (the attacker chose it), and unbound variables
// are public (they hold the constant 0). Ghost shapes inserted by assert
// elimination are bookkeeping and are never checked.
#pragma once

#include <string>
#include <vector>

#include "sps/ast.hpp"
#include "sps/inputs.hpp"
#include "sps/semantics.hpp"

namespace sps {

class Taint {
public:
  Taint() = default;  // public scalar
  static Taint scalar(bool secret) {
    Taint t;
    t.secret_ = secret;
    return t;
  }
  static Taint list(std::vector<Taint> elems) {
    Taint t;
    t.is_list_ = true;
    t.elems_ = std::move(elems);
    return t;
  }

  bool is_list() const { return is_list_; }
  const std::vector<Taint>& elems() const { return elems_; }
  std::vector<Taint>& elems() { return elems_; }

  // Join over the whole structure: is any part secret?
  bool any_secret() const {
    if (!is_list_) return secret_;
    for (const auto& t : elems_) {
      if (t.any_secret()) return true;
    }
    return false;
  }

  // The same shape with every leaf forced secret.
  Taint poisoned() const {
    if (!is_list_) return scalar(true);
    std::vector<Taint> out;
    out.reserve(elems_.size());
    for (const auto& t : elems_) out.push_back(t.poisoned());
    return list(std::move(out));
  }

private:
  bool is_list_ = false;
  bool secret_ = false;
  std::vector<Taint> elems_;
};

struct TaintViolation {
  std::int64_t step = 0;
  std::string what;
};

struct TaintResult {
  RunResult run;  // the underlying concrete run
  bool flagged = false;
  std::vector<TaintViolation> violations;
};

TaintResult taint_run(const TargetProgram& p, const PhiSpec& phi, const Input& input,
                      const Directives& dirs,
                      const LeakageModel& model = LeakageModel::baseline(),
                      std::int64_t fuel = kDefaultFuel,
                      const std::vector<std::string>& dir_vars = {"dir"});

}  // namespace sps
