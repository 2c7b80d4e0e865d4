// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/taint.hpp"

#include <utility>

#include "sps/eval.hpp"

namespace sps {

namespace {

using TaintEnv = std::map<std::string, Taint>;

const Taint& tenv_get(const TaintEnv& tenv, const std::string& name) {
  static const Taint pub;
  auto it = tenv.find(name);
  return it == tenv.end() ? pub : it->second;
}

Taint join(const Taint& a, const Taint& b) {
  if (a.is_list() && b.is_list() && a.elems().size() == b.elems().size()) {
    std::vector<Taint> out;
    out.reserve(a.elems().size());
    for (size_t i = 0; i < a.elems().size(); ++i) out.push_back(join(a.elems()[i], b.elems()[i]));
    return Taint::list(std::move(out));
  }
  return Taint::scalar(a.any_secret() || b.any_secret());
}

// Label of an expression under the current labels. Needs the concrete
// environment only to see which arm a `?:` takes; if that condition cannot be
// evaluated (the whole expression sits in a dead position of a short-circuit),
// both arms are joined instead.
Taint eval_taint(const ExprPtr& e, const Env& rho, const TaintEnv& tenv) {
  switch (e->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
      return Taint();
    case Expr::Kind::Var:
      return tenv_get(tenv, e->name);
    case Expr::Kind::Unary:
      return Taint::scalar(eval_taint(e->a, rho, tenv).any_secret());
    case Expr::Kind::Binary:
      return Taint::scalar(eval_taint(e->a, rho, tenv).any_secret() ||
                           eval_taint(e->b, rho, tenv).any_secret());
    case Expr::Kind::Select: {
      Taint tc = eval_taint(e->a, rho, tenv);
      Taint arm;
      try {
        arm = eval_bool(e->a, rho) ? eval_taint(e->b, rho, tenv) : eval_taint(e->c, rho, tenv);
      } catch (const EvalError&) {
        arm = join(eval_taint(e->b, rho, tenv), eval_taint(e->c, rho, tenv));
      }
      return tc.any_secret() ? arm.poisoned() : arm;
    }
    case Expr::Kind::Head: {
      const Taint& t = tenv_get(tenv, e->name);
      if (t.is_list() && !t.elems().empty()) return t.elems().front();
      return Taint::scalar(t.any_secret());
    }
    case Expr::Kind::Tail: {
      const Taint& t = tenv_get(tenv, e->name);
      if (t.is_list() && !t.elems().empty()) {
        return Taint::list({t.elems().begin() + 1, t.elems().end()});
      }
      return t;
    }
    case Expr::Kind::ListLit: {
      std::vector<Taint> items;
      items.reserve(e->items.size());
      for (const auto& it : e->items) items.push_back(eval_taint(it, rho, tenv));
      return Taint::list(std::move(items));
    }
    case Expr::Kind::Append: {
      Taint base = eval_taint(e->a, rho, tenv);
      std::vector<Taint> items = base.is_list() ? base.elems() : std::vector<Taint>{};
      for (const auto& it : e->items) items.push_back(eval_taint(it, rho, tenv));
      return Taint::list(std::move(items));
    }
  }
  return Taint();
}

struct Stop {
  RunStatus status;
  std::string msg;
};

void push_block(std::vector<CmdPtr>& stack, const Block& b) {
  for (auto it = b.rbegin(); it != b.rend(); ++it) stack.push_back(*it);
}

class TaintMachine {
public:
  TaintMachine(const TargetProgram& p, const PhiSpec& phi, const Input& input,
               const Directives& dirs, const LeakageModel& model, std::int64_t fuel,
               const std::vector<std::string>& dir_vars)
      : phi_(phi), model_(model), fuel_(fuel) {
    auto& run = res_.run;
    for (const auto& [name, v] : input.vars) {
      run.rho[name] = v;
      tenv_[name] = Taint::scalar(!phi.var_is_public(name));
    }
    for (const auto& [addr, v] : input.mem) run.mem.overwrite(addr, v);
    Value dir_list{directives_to_list(dirs)};
    Taint dir_taint = Taint::list(std::vector<Taint>(dirs.size()));
    for (const auto& name : dir_vars) {
      run.rho[name] = dir_list;
      tenv_[name] = dir_taint;
    }
    push_block(stack_, p.cmds);
  }

  TaintResult run() {
    auto& run = res_.run;
    try {
      while (!stack_.empty()) {
        if (run.steps >= fuel_) throw Stop{RunStatus::OutOfFuel, "fuel exhausted"};
        CmdPtr c = stack_.back();
        stack_.pop_back();
        ++run.steps;
        step(c);
      }
      run.status = RunStatus::Completed;
    } catch (const Stop& stop) {
      run.status = stop.status;
      run.error = stop.msg;
    } catch (const EvalError& e) {
      run.status = e.code == EvalError::Code::EmptyList ? RunStatus::OutOfDirectives
                                                        : RunStatus::RuntimeError;
      run.error = e.what();
    } catch (const std::out_of_range& e) {
      run.status = RunStatus::RuntimeError;
      run.error = e.what();
    }
    res_.flagged = !res_.violations.empty();
    return std::move(res_);
  }

private:
  Taint mem_default(const Int& addr) const {
    return Taint::scalar(!phi_.mem_is_public(addr));
  }
  const Taint mem_head(const Int& addr) const {
    auto it = tmem_.find(addr);
    if (it == tmem_.end() || it->second.empty()) return mem_default(addr);
    return it->second.front();
  }
  Taint mem_at(const Int& addr, const Int& k) const {
    auto it = tmem_.find(addr);
    if (it == tmem_.end() || it->second.empty()) return mem_default(addr);
    Int n = Int(it->second.size());
    if (k < 0 || k >= n) return mem_default(addr);
    return it->second[static_cast<size_t>(k)];
  }
  void mem_overwrite(const Int& addr, Taint t) { tmem_[addr] = {std::move(t)}; }
  void mem_push(const Int& addr, Taint t) {
    auto& hist = tmem_[addr];
    if (hist.empty()) hist.push_back(mem_default(addr));
    hist.insert(hist.begin(), std::move(t));
  }
  void mem_clear() {
    for (auto& [addr, hist] : tmem_) {
      if (hist.size() > 1) hist.resize(1);
    }
  }

  void check(const ExprPtr& e, const char* what) {
    if (eval_taint(e, res_.run.rho, tenv_).any_secret()) {
      res_.violations.push_back({res_.run.steps, what});
    }
  }

  void step(const CmdPtr& cp) {
    const Cmd& c = *cp;
    auto& run = res_.run;
    Env& rho = run.rho;
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return;
      case Cmd::Kind::Assign: {
        const ExprPtr& rhs = c.e1;
        if (model_.leaks_division() && rhs->kind == Expr::Kind::Binary &&
            rhs->bin == BinOp::Div) {
          check(rhs, "secret-dependent division operand size");
          Int a = eval_int(rhs->a, rho);
          Int b = eval_int(rhs->b, rho);
          run.trace.push_back(Obs::mk_op({bit_log2(a), bit_log2(b)}));
          if (b == 0) throw EvalError(EvalError::Code::DivByZero, "division by zero");
          Taint t = eval_taint(rhs, rho, tenv_);
          rho[c.var] = Value(floor_div(a, b));
          tenv_[c.var] = std::move(t);
          return;
        }
        Taint t = eval_taint(rhs, rho, tenv_);
        rho[c.var] = eval(rhs, rho);
        tenv_[c.var] = std::move(t);
        return;
      }
      case Cmd::Kind::Load: {
        check(c.e1, "secret-dependent load address");
        Int addr = eval_int(c.e1, rho);
        if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
        run.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        rho[c.var] = run.mem.head(addr);
        tenv_[c.var] = mem_head(addr);
        return;
      }
      case Cmd::Kind::Store: {
        check(c.e1, "secret-dependent store address");
        Int addr = eval_int(c.e1, rho);
        if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
        run.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        run.mem.overwrite(addr, env_get(rho, c.var));
        mem_overwrite(addr, tenv_get(tenv_, c.var));
        return;
      }
      case Cmd::Kind::IndexedLoad: {
        check(c.e1, "secret-dependent load address");
        Int addr = eval_int(c.e1, rho);
        Int k = eval_int(c.e2, rho);
        if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
        run.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        if (k < 0 || k >= run.mem.depth(addr)) {
          throw Stop{RunStatus::RuntimeError, "stale-load index out of range"};
        }
        rho[c.var] = run.mem.at(addr, k);
        tenv_[c.var] = mem_at(addr, k);
        return;
      }
      case Cmd::Kind::AppendStore: {
        check(c.e1, "secret-dependent store address");
        Int addr = eval_int(c.e1, rho);
        if (addr < 0) throw Stop{RunStatus::RuntimeError, "negative memory address"};
        run.trace.push_back(Obs::mk_addr(model_.laddr(addr)));
        run.mem.push(addr, env_get(rho, c.var));
        mem_push(addr, tenv_get(tenv_, c.var));
        return;
      }
      case Cmd::Kind::ClearMem:
        run.mem.clear_to_head();
        mem_clear();
        return;
      case Cmd::Kind::Assert:
        if (!eval_bool(c.e1, rho)) throw Stop{RunStatus::AssertError, "assertion failed"};
        return;
      case Cmd::Kind::If: {
        if (is_ghost_guard_cond(c.e1)) {
          push_block(stack_, eval_bool(c.e1, rho) ? c.body1 : c.body2);
          return;
        }
        check(c.e1, "secret-dependent branch condition");
        bool b = eval_bool(c.e1, rho);
        run.trace.push_back(Obs::mk_branch(b));
        push_block(stack_, b ? c.body1 : c.body2);
        return;
      }
      case Cmd::Kind::While: {
        ExprPtr real = ghost_while_real_cond(c.e1);
        if (real) {
          if (!eval_bool(make_un(UnOp::Not, make_var("ret")), rho)) return;
          check(real, "secret-dependent branch condition");
          bool b = eval_bool(real, rho);
          run.trace.push_back(Obs::mk_branch(b));
          if (b) {
            stack_.push_back(cp);
            push_block(stack_, c.body1);
          }
          return;
        }
        check(c.e1, "secret-dependent branch condition");
        bool b = eval_bool(c.e1, rho);
        run.trace.push_back(Obs::mk_branch(b));
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

  const PhiSpec& phi_;
  const LeakageModel& model_;
  std::int64_t fuel_;
  std::vector<CmdPtr> stack_;
  TaintEnv tenv_;
  std::map<Int, std::vector<Taint>> tmem_;
  TaintResult res_;
};

}  // namespace

TaintResult taint_run(const TargetProgram& p, const PhiSpec& phi, const Input& input,
                      const Directives& dirs, const LeakageModel& model, std::int64_t fuel,
                      const std::vector<std::string>& dir_vars) {
  return TaintMachine(p, phi, input, dirs, model, fuel, dir_vars).run();
}

}  // namespace sps
