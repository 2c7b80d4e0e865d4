// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/semantics.hpp"

#include <utility>

namespace sps {

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::FenceHalt: return "fence_halt";
    case RunStatus::AssertError: return "assert_error";
    case RunStatus::OutOfDirectives: return "out_of_directives";
    case RunStatus::OutOfFuel: return "out_of_fuel";
    case RunStatus::RuntimeError: return "runtime_error";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Memory

namespace {
const Value& default_cell() {
  static const Value zero{Int(0)};
  return zero;
}
}  // namespace

const Value& Memory::head(const Int& addr) const {
  auto it = cells_.find(addr);
  if (it == cells_.end() || it->second.empty()) return default_cell();
  return it->second.front();
}

const Value& Memory::at(const Int& addr, const Int& k) const {
  auto it = cells_.find(addr);
  if (it == cells_.end() || it->second.empty()) {
    if (k == 0) return default_cell();
    throw std::out_of_range("memory history index out of range");
  }
  if (k < 0 || k >= Int(it->second.size())) {
    throw std::out_of_range("memory history index out of range");
  }
  return it->second[static_cast<size_t>(k)];
}

Int Memory::depth(const Int& addr) const {
  auto it = cells_.find(addr);
  if (it == cells_.end() || it->second.empty()) return 1;
  return Int(it->second.size());
}

void Memory::overwrite(const Int& addr, Value v) { cells_[addr] = {std::move(v)}; }

void Memory::push(const Int& addr, Value v) {
  auto& hist = cells_[addr];
  if (hist.empty()) hist.push_back(default_cell());  // materialize the implicit 0
  hist.insert(hist.begin(), std::move(v));
}

void Memory::clear_to_head() {
  for (auto& [addr, hist] : cells_) {
    if (hist.size() > 1) hist.resize(1);
  }
}

std::map<Int, std::vector<Value>> Memory::normalized() const {
  std::map<Int, std::vector<Value>> out;
  for (const auto& [addr, hist] : cells_) {
    if (hist.empty()) continue;
    if (hist.size() == 1 && hist.front() == default_cell()) continue;
    out.emplace(addr, hist);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ghost shapes

bool is_ghost_guard_cond(const ExprPtr& e) {
  return e && e->kind == Expr::Kind::Unary && e->un == UnOp::Not && e->a &&
         e->a->kind == Expr::Kind::Var && e->a->name == "ret";
}

ExprPtr ghost_while_real_cond(const ExprPtr& e) {
  if (e && e->kind == Expr::Kind::Binary && e->bin == BinOp::And && is_ghost_guard_cond(e->a)) {
    return e->b;
  }
  return nullptr;
}

Value::List directives_to_list(const Directives& ds) {
  Value::List xs;
  xs.reserve(ds.size());
  for (const auto& d : ds) {
    if (d.kind == Directive::Kind::Force) {
      xs.emplace_back(d.force);
    } else {
      xs.emplace_back(d.index);
    }
  }
  return xs;
}

// ---------------------------------------------------------------------------
// Shared machinery

namespace {

// Thrown to end a run with a non-Completed status.
struct Stop {
  RunStatus status;
  std::string msg;
};

// Both machines execute an explicit work list (top of the vector is the next
// command); pushing a block in reverse keeps source order.
void push_block(std::vector<CmdPtr>& stack, const Block& b) {
  for (auto it = b.rbegin(); it != b.rend(); ++it) stack.push_back(*it);
}

// Assignment, shared by both machines so the variable-time division leak is
// emitted identically: operands are evaluated left to right, the operand-size
// observation comes before the quotient is computed, and the division itself
// can still fault afterwards.
void exec_assign(const Cmd& c, Env& rho, Trace& trace, const LeakageModel& model) {
  const ExprPtr& rhs = c.e1;
  if (model.leaks_division() && rhs->kind == Expr::Kind::Binary && rhs->bin == BinOp::Div) {
    Int a = eval_int(rhs->a, rho);
    Int b = eval_int(rhs->b, rho);
    trace.push_back(Obs::mk_op({bit_log2(a), bit_log2(b)}));
    if (b == 0) throw EvalError(EvalError::Code::DivByZero, "division by zero");
    rho[c.var] = Value(floor_div(a, b));
    return;
  }
  rho[c.var] = eval(rhs, rho);
}

Int checked_addr(const ExprPtr& e, const Env& rho) {
  Int a = eval_int(e, rho);
  if (a < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Speculative machine

namespace {

class SpecMachine {
public:
  SpecMachine(const SourceProgram& p, const Input& input, DirectiveSupplier& supplier,
              const LeakageModel& model, SpectreVariant variant, std::int64_t fuel)
      : supplier_(supplier), model_(model), variant_(variant), fuel_(fuel) {
    for (const auto& [name, v] : input.vars) res_.rho[name] = v;
    for (const auto& [addr, v] : input.mem) res_.mem.overwrite(addr, v);
    push_block(stack_, p.cmds);
  }

  RunResult run() {
    try {
      while (!stack_.empty()) {
        if (res_.steps >= fuel_) throw Stop{RunStatus::OutOfFuel, "fuel exhausted"};
        CmdPtr c = stack_.back();
        stack_.pop_back();
        ++res_.steps;
        step(c);
      }
      res_.status = RunStatus::Completed;
    } catch (const Stop& stop) {
      res_.status = stop.status;
      res_.error = stop.msg;
    } catch (const EvalError& e) {
      res_.status = RunStatus::RuntimeError;
      res_.error = e.what();
    } catch (const std::out_of_range& e) {
      res_.status = RunStatus::RuntimeError;
      res_.error = e.what();
    }
    res_.ms = ms_;
    return res_;
  }

private:
  Directive take(Directive::Kind kind, Int hist_depth = Int(0)) {
    DirectiveRequest req;
    req.kind = kind;
    req.hist_depth = std::move(hist_depth);
    auto d = supplier_.next(req);
    if (!d || d->kind != kind) {
      throw Stop{RunStatus::OutOfDirectives, "directive stream exhausted or mismatched"};
    }
    ++res_.directives_consumed;
    return *d;
  }

  void step(const CmdPtr& cp) {
    const Cmd& c = *cp;
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return;
      case Cmd::Kind::Assign:
        exec_assign(c, res_.rho, res_.trace, model_);
        return;
      case Cmd::Kind::Load: {
        Int addr = eval_int(c.e1, res_.rho);
        if (variant_ == SpectreVariant::V4) {
          // The attacker picks which buffered write the load observes.
          Directive d = take(Directive::Kind::Load, res_.mem.depth(addr));
          if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
          res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
          if (d.index < 0 || d.index >= res_.mem.depth(addr)) {
            throw Stop{RunStatus::RuntimeError, "stale-load index out of range"};
          }
          res_.rho[c.var] = res_.mem.at(addr, d.index);
          ms_ = ms_ || (d.index != 0);
        } else {
          if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
          res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
          res_.rho[c.var] = res_.mem.head(addr);
        }
        return;
      }
      case Cmd::Kind::Store: {
        Int addr = checked_addr(c.e1, res_.rho);
        res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        const Value& v = env_get(res_.rho, c.var);
        if (variant_ == SpectreVariant::V4) {
          res_.mem.push(addr, v);  // buffered: older writes stay visible
        } else {
          res_.mem.overwrite(addr, v);
        }
        return;
      }
      case Cmd::Kind::InitMsf:
        if (ms_) throw Stop{RunStatus::FenceHalt, "fence reached while misspeculating"};
        res_.rho["msf"] = Value(false);
        if (variant_ == SpectreVariant::V4) res_.mem.clear_to_head();
        return;
      case Cmd::Kind::UpdateMsf:
        // msf := e ? msf : true — the untaken arm is not evaluated, matching
        // the conditional the transform emits for this command.
        res_.rho["msf"] =
            eval(make_select(c.e1, make_var("msf"), make_bool(true)), res_.rho);
        return;
      case Cmd::Kind::Protect:
        res_.rho[c.var] =
            eval(make_select(make_var("msf"), make_int(0), c.e1), res_.rho);
        return;
      case Cmd::Kind::If: {
        bool real = eval_bool(c.e1, res_.rho);
        Directive d = take(Directive::Kind::Force);
        res_.trace.push_back(Obs::mk_branch(real));
        ms_ = ms_ || (d.force != real);
        push_block(stack_, d.force ? c.body1 : c.body2);
        return;
      }
      case Cmd::Kind::While: {
        bool real = eval_bool(c.e1, res_.rho);
        Directive d = take(Directive::Kind::Force);
        res_.trace.push_back(Obs::mk_branch(real));
        ms_ = ms_ || (d.force != real);
        if (d.force) {
          stack_.push_back(cp);
          push_block(stack_, c.body1);
        }
        return;
      }
      case Cmd::Kind::Assert:
      case Cmd::Kind::IndexedLoad:
      case Cmd::Kind::AppendStore:
      case Cmd::Kind::ClearMem:
        throw Stop{RunStatus::RuntimeError, "target-only command in source program"};
    }
  }

  DirectiveSupplier& supplier_;
  const LeakageModel& model_;
  SpectreVariant variant_;
  std::int64_t fuel_;
  std::vector<CmdPtr> stack_;
  RunResult res_;
  bool ms_ = false;
};

}  // namespace

RunResult run_spec_with(const SourceProgram& p, const Input& input, DirectiveSupplier& supplier,
                        const LeakageModel& model, SpectreVariant variant, std::int64_t fuel) {
  return SpecMachine(p, input, supplier, model, variant, fuel).run();
}

RunResult run_spec(const SourceProgram& p, const Input& input, const Directives& dirs,
                   const LeakageModel& model, SpectreVariant variant, std::int64_t fuel) {
  ListSupplier supplier(dirs);
  return run_spec_with(p, input, supplier, model, variant, fuel);
}

// ---------------------------------------------------------------------------
// Sequential machine

namespace {

class SeqMachine {
public:
  SeqMachine(const TargetProgram& p, const Input& input, const Directives& dirs,
             const LeakageModel& model, std::int64_t fuel,
             const std::vector<std::string>& dir_vars)
      : model_(model), fuel_(fuel) {
    for (const auto& [name, v] : input.vars) res_.rho[name] = v;
    for (const auto& [addr, v] : input.mem) res_.mem.overwrite(addr, v);
    Value dir_list{directives_to_list(dirs)};
    for (const auto& name : dir_vars) res_.rho[name] = dir_list;
    initial_dirs_ = Int(dirs.size());
    dir_var_ = dir_vars.empty() ? std::string("dir") : dir_vars.front();
    push_block(stack_, p.cmds);
  }

  RunResult run() {
    try {
      while (!stack_.empty()) {
        if (res_.steps >= fuel_) throw Stop{RunStatus::OutOfFuel, "fuel exhausted"};
        CmdPtr c = stack_.back();
        stack_.pop_back();
        ++res_.steps;
        step(c);
      }
      res_.status = RunStatus::Completed;
    } catch (const Stop& stop) {
      res_.status = stop.status;
      res_.error = stop.msg;
    } catch (const EvalError& e) {
      // Running off the end of the directive list is a truncation, not a bug
      // in the program under test.
      res_.status = e.code == EvalError::Code::EmptyList ? RunStatus::OutOfDirectives
                                                         : RunStatus::RuntimeError;
      res_.error = e.what();
    } catch (const std::out_of_range& e) {
      res_.status = RunStatus::RuntimeError;
      res_.error = e.what();
    }
    finish_consumed();
    return res_;
  }

private:
  void finish_consumed() {
    const Value& v = env_get(res_.rho, dir_var_);
    if (v.is_list()) {
      Int remaining = Int(v.as_list().size());
      if (initial_dirs_ >= remaining) res_.directives_consumed =
          static_cast<std::int64_t>(initial_dirs_ - remaining);
    }
  }

  void step(const CmdPtr& cp) {
    const Cmd& c = *cp;
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return;
      case Cmd::Kind::Assign:
        exec_assign(c, res_.rho, res_.trace, model_);
        return;
      case Cmd::Kind::Load: {
        Int addr = checked_addr(c.e1, res_.rho);
        res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        res_.rho[c.var] = res_.mem.head(addr);
        return;
      }
      case Cmd::Kind::Store: {
        Int addr = checked_addr(c.e1, res_.rho);
        res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        res_.mem.overwrite(addr, env_get(res_.rho, c.var));
        return;
      }
      case Cmd::Kind::IndexedLoad: {
        Int addr = eval_int(c.e1, res_.rho);
        Int k = eval_int(c.e2, res_.rho);
        if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
        res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        if (k < 0 || k >= res_.mem.depth(addr)) {
          throw Stop{RunStatus::RuntimeError, "stale-load index out of range"};
        }
        res_.rho[c.var] = res_.mem.at(addr, k);
        return;
      }
      case Cmd::Kind::AppendStore: {
        Int addr = checked_addr(c.e1, res_.rho);
        res_.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        res_.mem.push(addr, env_get(res_.rho, c.var));
        return;
      }
      case Cmd::Kind::ClearMem:
        res_.mem.clear_to_head();
        return;
      case Cmd::Kind::Assert:
        if (!eval_bool(c.e1, res_.rho)) {
          throw Stop{RunStatus::AssertError, "assertion failed"};
        }
        return;
      case Cmd::Kind::If: {
        if (is_ghost_guard_cond(c.e1)) {
          // Bookkeeping guard inserted by assert elimination: no observation.
          push_block(stack_, eval_bool(c.e1, res_.rho) ? c.body1 : c.body2);
          return;
        }
        bool b = eval_bool(c.e1, res_.rho);
        res_.trace.push_back(Obs::mk_branch(b));
        push_block(stack_, b ? c.body1 : c.body2);
        return;
      }
      case Cmd::Kind::While: {
        if (ExprPtr real = ghost_while_real_cond(c.e1)) {
          // Strengthened loop head: once ret is set the loop exits silently;
          // until then it leaks exactly what the original head leaked.
          if (!eval_bool(make_un(UnOp::Not, make_var("ret")), res_.rho)) return;
          bool b = eval_bool(real, res_.rho);
          res_.trace.push_back(Obs::mk_branch(b));
          if (b) {
            stack_.push_back(cp);
            push_block(stack_, c.body1);
          }
          return;
        }
        bool b = eval_bool(c.e1, res_.rho);
        res_.trace.push_back(Obs::mk_branch(b));
        if (b) {
          stack_.push_back(cp);
          push_block(stack_, c.body1);
        }
        return;
      }
      case Cmd::Kind::InitMsf:
      case Cmd::Kind::UpdateMsf:
      case Cmd::Kind::Protect:
        throw Stop{RunStatus::RuntimeError, "source-only command in target program"};
    }
  }

  const LeakageModel& model_;
  std::int64_t fuel_;
  std::vector<CmdPtr> stack_;
  RunResult res_;
  Int initial_dirs_;
  std::string dir_var_;
};

}  // namespace

RunResult run_seq(const TargetProgram& p, const Input& input, const Directives& dirs,
                  const LeakageModel& model, std::int64_t fuel,
                  const std::vector<std::string>& dir_vars) {
  return SeqMachine(p, input, dirs, model, fuel, dir_vars).run();
}

}  // namespace sps
