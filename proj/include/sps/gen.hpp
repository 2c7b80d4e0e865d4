// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Random program and policy generation for differential testing. Generated
// memory addresses are always wrapped with `mod mem_size`, so runs never
// fault on out-of-range accesses; generated divisions get a `(e mod 4) + 1`
// divisor, so they never fault either. Loops in target programs follow a
// bounded counter shape (the counter is not otherwise written in the body);
// source-program loops can use arbitrary conditions because the speculative
// semantics bounds every loop by the directive budget.
#pragma once

#include "sps/ast.hpp"
#include "sps/checker.hpp"
#include "sps/inputs.hpp"

namespace sps {

struct ProgGenConfig {
  int num_vars = 4;        // variable pool v0..v{n-1}
  int max_depth = 3;       // control-flow nesting bound
  int max_block_len = 4;   // commands per block
  int max_expr_depth = 2;  // expression nesting bound
  Int mem_size = 16;
  bool with_msf_ops = true;    // source programs: fence/update/protect
  bool with_asserts = false;   // target programs: assert commands
  bool with_division = true;   // include / and mod in arithmetic
  int loop_bound = 3;          // target counter loops run at most this often
};

SourceProgram gen_source_program(Rng& rng, const ProgGenConfig& cfg);
TargetProgram gen_target_program(Rng& rng, const ProgGenConfig& cfg);

// Random public/secret split over the given variables and a random public
// memory prefix [0, k); no constraints.
PhiSpec gen_phi(Rng& rng, const std::vector<std::string>& vars, const ProgGenConfig& cfg);

}  // namespace sps
