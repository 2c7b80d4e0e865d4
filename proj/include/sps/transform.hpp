// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Program transformations.
//
//  * sps / sps_v4 compile a speculative source program into a sequential
//    target program that takes the attacker's directives as an input list
//    (`dir`) and tracks the misspeculation bit in an ordinary variable
//    (`ms`). A run of the source under the speculative semantics with
//    directives d corresponds step-for-step to a run of the transformed
//    program with `dir` bound to d: same final state, and the target trace
//    is t_obs(source trace, d).
//
//  * t_obs / t_obs_inv convert between the two trace shapes: the target
//    leaks each branch condition twice (once for the real condition, once
//    for the directive that was followed), so t_obs duplicates branch
//    observations using the directive stream and t_obs_inv drops the
//    second of each pair. t_obs is injective in its trace argument.
//
//  * assert_elim removes assertions: `ret` starts false, each `assert e`
//    becomes `ret = ret || !e`, and everything after a command that can set
//    `ret` is wrapped in the ghost guard `if !ret { .. } else {}` (loop
//    heads are strengthened to `!ret && e`). Ghost shapes are invisible to
//    the sequential semantics, so the transformed program produces exactly
//    the trace and final state (up to `ret`) of the original, whether or
//    not an assertion failed.
//
//  * leak_instrument makes the leakage of an assert-free program explicit:
//    `obs` starts empty and every observation the semantics would emit is
//    appended to it as a tagged record (0 branch, 1 address, 2 operand
//    sizes). decode_obs turns the final `obs` value back into a trace.
//
//  * product builds the self-composition of an assert-free program: two
//    copies with `_1`/`_2`-suffixed variables, the second copy's memory
//    shifted by a fixed offset, and an assertion before every leak that
//    both copies leak the same value. The product is assert-safe on a pair
//    of inputs iff the two individual runs produce equal traces.
#pragma once

#include <stdexcept>
#include <string>

#include "sps/ast.hpp"

namespace sps {

struct TransformError : std::runtime_error {
  explicit TransformError(const std::string& what) : std::runtime_error(what) {}
};

TargetProgram sps(const SourceProgram& p);
TargetProgram sps_v4(const SourceProgram& p);

// Maps a speculative trace to the corresponding target trace. Only the
// branch directives in `dirs` are used (stale-load directives are skipped),
// one per branch observation; throws std::invalid_argument if they run out.
Trace t_obs(const Trace& trace, const Directives& dirs);
Trace t_obs_inv(const Trace& trace);

TargetProgram assert_elim(const TargetProgram& p);

TargetProgram leak_instrument(const TargetProgram& p,
                              const LeakageModel& model = LeakageModel::baseline());

// Decodes a final `obs` list produced by an instrumented program. Throws
// std::invalid_argument on malformed data.
Trace decode_obs(const Value& obs);

inline const Int kDefaultProductOffset = Int(1) << 20;

TargetProgram product(const TargetProgram& p,
                      const LeakageModel& model = LeakageModel::baseline(),
                      const Int& offset = kDefaultProductOffset);

// Renames every variable x to x<suffix> (used by product with "_1"/"_2").
TargetProgram rtag(const TargetProgram& p, const std::string& suffix);

}  // namespace sps
