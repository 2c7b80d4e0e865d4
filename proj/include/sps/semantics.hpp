// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// The two interpreters.
//
// run_spec executes a source program under the attacker-directed speculative
// semantics: every branch consumes a `force` directive and follows it (the
// real condition value is what leaks), and the misspeculation bit records
// whether any prediction disagreed with the real outcome. Under the v4
// variant, memory cells keep a most-recent-first history; loads consume a
// `load n` directive selecting the n-th most recent write, and init_msf
// collapses every history. A run halts at init_msf while misspeculating
// (FenceHalt) — that is a final state, not an error.
//
// run_seq executes a target program sequentially; directives are data,
// installed as a list bound to `dir` before the first step. Branches leak
// their condition, memory operations leak their (model-abstracted) address,
// and a failed assert terminates the run in an error state.
//
// Ghost control flow: branches of the exact shapes `if !ret { .. } else {}`
// and `while (!ret && e) { .. }` are bookkeeping inserted by assert
// elimination. The guard emits no observation; the strengthened loop head
// leaks branch(e) while ret is false and nothing once ret is true. `ret` is
// reserved, so source programs can never alias the convention.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sps/ast.hpp"
#include "sps/eval.hpp"
#include "sps/inputs.hpp"

namespace sps {

enum class RunStatus {
  Completed,
  FenceHalt,        // speculative runs only
  AssertError,      // sequential runs only
  OutOfDirectives,  // directive list exhausted or of the wrong shape
  OutOfFuel,
  RuntimeError,  // negative address, bad history index, division by zero, type error
};

const char* run_status_name(RunStatus s);

// Memory: address -> write history, most recent first. Absent cells read as a
// single default entry 0. The plain store overwrites (history of one); the v4
// store prepends; clear_to_head truncates every history to its most recent
// entry.
class Memory {
public:
  Memory() = default;

  const Value& head(const Int& addr) const;
  const Value& at(const Int& addr, const Int& k) const;  // throws std::out_of_range
  Int depth(const Int& addr) const;
  void overwrite(const Int& addr, Value v);
  void push(const Int& addr, Value v);
  void clear_to_head();

  const std::map<Int, std::vector<Value>>& cells() const { return cells_; }

  friend bool operator==(const Memory& a, const Memory& b) {
    return a.normalized() == b.normalized();
  }
  friend bool operator!=(const Memory& a, const Memory& b) { return !(a == b); }

private:
  std::map<Int, std::vector<Value>> normalized() const;
  std::map<Int, std::vector<Value>> cells_;
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  Trace trace;
  std::int64_t steps = 0;
  std::int64_t directives_consumed = 0;
  Env rho;
  Memory mem;
  bool ms = false;  // final misspeculation bit (speculative runs)
  std::string error;

  bool is_final() const {
    return status == RunStatus::Completed || status == RunStatus::FenceHalt ||
           status == RunStatus::AssertError;
  }
};

// Directive suppliers let callers drive speculative runs adaptively (the
// checker enumerates the reachable directive tree this way). A request tells
// the supplier what shape the semantics needs next; for loads, hist_depth is
// the number of entries in the addressed cell's history (valid indices are
// [0, hist_depth)).
struct DirectiveRequest {
  Directive::Kind kind = Directive::Kind::Force;
  Int hist_depth;
};

class DirectiveSupplier {
public:
  virtual ~DirectiveSupplier() = default;
  // nullopt stops the run with OutOfDirectives.
  virtual std::optional<Directive> next(const DirectiveRequest& req) = 0;
};

// Serves a fixed list in order.
class ListSupplier : public DirectiveSupplier {
public:
  explicit ListSupplier(Directives ds) : ds_(std::move(ds)) {}
  std::optional<Directive> next(const DirectiveRequest&) override {
    if (pos_ >= ds_.size()) return std::nullopt;
    return ds_[pos_++];
  }

private:
  Directives ds_;
  size_t pos_ = 0;
};

inline constexpr std::int64_t kDefaultFuel = 100000;

RunResult run_spec(const SourceProgram& p, const Input& input, const Directives& dirs,
                   const LeakageModel& model = LeakageModel::baseline(),
                   SpectreVariant variant = SpectreVariant::V1, std::int64_t fuel = kDefaultFuel);

RunResult run_spec_with(const SourceProgram& p, const Input& input, DirectiveSupplier& supplier,
                        const LeakageModel& model = LeakageModel::baseline(),
                        SpectreVariant variant = SpectreVariant::V1,
                        std::int64_t fuel = kDefaultFuel);

// dir_vars lists the variables that receive the directive list (product
// programs bind it under both copy names).
RunResult run_seq(const TargetProgram& p, const Input& input, const Directives& dirs,
                  const LeakageModel& model = LeakageModel::baseline(),
                  std::int64_t fuel = kDefaultFuel,
                  const std::vector<std::string>& dir_vars = {"dir"});

// Ghost-shape recognizers (assert-elimination scaffolding).
bool is_ghost_guard_cond(const ExprPtr& e);           // !ret
ExprPtr ghost_while_real_cond(const ExprPtr& e);      // (!ret && e) -> e, else nullptr

// Encodes a directive list as the runtime value bound to `dir`.
Value::List directives_to_list(const Directives& ds);

}  // namespace sps
