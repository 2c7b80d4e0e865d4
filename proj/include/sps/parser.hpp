// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Hand-written LL(1) lexer/parser for the two program dialects.
//
//   source  — speculative command set (assignments, loads/stores, branches,
//             init_msf / update_msf / protect). The names dir, ms, obs and
//             ret are reserved and rejected.
//   target  — sequential command set: no MSF primitives, but assert,
//             indexed loads (x <- [e] @ e), append stores ([e] <+ x),
//             clear_mem, selects (e ? e : e), hd/tl, list literals, ++ and
//             log2(e).
//
// `leak e;` is accepted in both dialects as sugar for `if e {} else {}`, and
// `if e { .. }` without an else clause is sugar for an empty else block.
// `//` line comments are skipped.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "sps/ast.hpp"

namespace sps {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& what, int line_, int col_)
      : std::runtime_error(what + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

SourceProgram parse_source(std::string_view text);
TargetProgram parse_target(std::string_view text);

// Expression-only entry point (used for phi constraints). Reserved names are
// rejected unless `target_dialect` is set.
ExprPtr parse_expr_text(std::string_view text, bool target_dialect = false);

}  // namespace sps
