// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Canonical printer. `pretty` output re-parses to the same AST; printing the
// parse of pretty output reproduces it byte for byte (idempotent after one
// pass).
#pragma once

#include <string>

#include "sps/ast.hpp"

namespace sps {

std::string pretty_expr(const ExprPtr& e);
std::string pretty(const Block& program);
std::string pretty(const SourceProgram& p);
std::string pretty(const TargetProgram& p);

}  // namespace sps
