// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Expression evaluation over total variable maps (unbound names read as the
// integer 0). `&&`/`||` short-circuit and `?:` evaluates only the taken arm,
// so guarded divisions and masked values never fault.
#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "sps/ast.hpp"

namespace sps {

using Env = std::map<std::string, Value>;

struct EvalError : std::runtime_error {
  enum class Code { TypeError, DivByZero, EmptyList };
  Code code;
  EvalError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
};

// Reads rho(name), defaulting to Int(0).
const Value& env_get(const Env& rho, const std::string& name);

Value eval(const ExprPtr& e, const Env& rho);

// Convenience wrappers that enforce the expected result type.
bool eval_bool(const ExprPtr& e, const Env& rho);
Int eval_int(const ExprPtr& e, const Env& rho);

}  // namespace sps
