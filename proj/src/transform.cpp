// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/transform.hpp"

#include <utility>

#include "sps/semantics.hpp"

namespace sps {

namespace {

ExprPtr var_ms() { return make_var("ms"); }
ExprPtr var_msf() { return make_var("msf"); }
ExprPtr var_ret() { return make_var("ret"); }
ExprPtr var_obs() { return make_var("obs"); }

// dir = tl(dir)
CmdPtr advance_dir() { return cmd_assign("dir", make_tail("dir")); }

ExprPtr not_of(ExprPtr e) { return make_un(UnOp::Not, std::move(e)); }
ExprPtr or_of(ExprPtr a, ExprPtr b) { return make_bin(BinOp::Or, std::move(a), std::move(b)); }
ExprPtr and_of(ExprPtr a, ExprPtr b) { return make_bin(BinOp::And, std::move(a), std::move(b)); }
ExprPtr eq_of(ExprPtr a, ExprPtr b) { return make_bin(BinOp::Eq, std::move(a), std::move(b)); }

void append(Block& out, Block more) {
  for (auto& c : more) out.push_back(std::move(c));
}

void require_source_shape(const SourceProgram& p) {
  std::set<std::string> vars;
  collect_vars(p.cmds, vars);
  for (const auto& name : reserved_names()) {
    if (vars.count(name)) {
      throw TransformError("source program uses reserved variable '" + name + "'");
    }
  }
  for (auto kind : {Cmd::Kind::Assert, Cmd::Kind::IndexedLoad, Cmd::Kind::AppendStore,
                    Cmd::Kind::ClearMem}) {
    if (block_contains(p.cmds, kind)) {
      throw TransformError("source program contains a target-only command");
    }
  }
}

// ---------------------------------------------------------------------------
// Speculation-passing transform

class SpsBuilder {
public:
  explicit SpsBuilder(SpectreVariant variant) : variant_(variant) {}

  Block block(const Block& b) {
    Block out;
    for (const auto& c : b) cmd(c, out);
    return out;
  }

private:
  void cmd(const CmdPtr& c, Block& out) {
    switch (c->kind) {
      case Cmd::Kind::Skip:
      case Cmd::Kind::Assign:
        out.push_back(c);
        return;
      case Cmd::Kind::Load:
        if (variant_ == SpectreVariant::V4) {
          // The load consults the directive to pick a buffered write; a
          // nonzero pick means the sequential run would have seen a newer
          // value, i.e. we are misspeculating.
          out.push_back(cmd_indexed_load(c->var, c->e1, make_head("dir")));
          out.push_back(cmd_assign(
              "ms", or_of(var_ms(), make_bin(BinOp::Ne, make_head("dir"), make_int(0)))));
          out.push_back(advance_dir());
        } else {
          out.push_back(c);
        }
        return;
      case Cmd::Kind::Store:
        if (variant_ == SpectreVariant::V4) {
          out.push_back(cmd_append_store(c->e1, c->var));
        } else {
          out.push_back(c);
        }
        return;
      case Cmd::Kind::InitMsf:
        // The speculative machine halts here when misspeculating; the target
        // turns that halt into an assertion failure.
        out.push_back(cmd_assert(not_of(var_ms())));
        out.push_back(cmd_assign("msf", make_bool(false)));
        if (variant_ == SpectreVariant::V4) out.push_back(cmd_clear_mem());
        return;
      case Cmd::Kind::UpdateMsf:
        out.push_back(cmd_assign("msf", make_select(c->e1, var_msf(), make_bool(true))));
        return;
      case Cmd::Kind::Protect:
        out.push_back(cmd_assign(c->var, make_select(var_msf(), make_int(0), c->e1)));
        return;
      case Cmd::Kind::If: {
        // leak e;
        // if hd(dir) { dir = tl(dir); ms = ms || !e; T(then) }
        // else       { dir = tl(dir); ms = ms || e;  T(else) }
        out.push_back(cmd_leak(c->e1));
        Block then_b{advance_dir(), cmd_assign("ms", or_of(var_ms(), not_of(c->e1)))};
        append(then_b, block(c->body1));
        Block else_b{advance_dir(), cmd_assign("ms", or_of(var_ms(), c->e1))};
        append(else_b, block(c->body2));
        out.push_back(cmd_if(make_head("dir"), std::move(then_b), std::move(else_b)));
        return;
      }
      case Cmd::Kind::While: {
        // leak e;
        // while hd(dir) { dir = tl(dir); ms = ms || !e; T(body); leak e; }
        // ms = ms || e; dir = tl(dir);
        //
        // The trailing leak re-states the condition for the next round of the
        // loop head, keeping the two-observations-per-branch discipline across
        // iterations; the epilogue accounts for the final not-taken directive.
        out.push_back(cmd_leak(c->e1));
        Block body{advance_dir(), cmd_assign("ms", or_of(var_ms(), not_of(c->e1)))};
        append(body, block(c->body1));
        body.push_back(cmd_leak(c->e1));
        out.push_back(cmd_while(make_head("dir"), std::move(body)));
        out.push_back(cmd_assign("ms", or_of(var_ms(), c->e1)));
        out.push_back(advance_dir());
        return;
      }
      case Cmd::Kind::Assert:
      case Cmd::Kind::IndexedLoad:
      case Cmd::Kind::AppendStore:
      case Cmd::Kind::ClearMem:
        throw TransformError("target-only command in source program");
    }
  }

  SpectreVariant variant_;
};

TargetProgram sps_impl(const SourceProgram& p, SpectreVariant variant) {
  require_source_shape(p);
  SpsBuilder builder(variant);
  TargetProgram out;
  out.cmds.push_back(cmd_assign("ms", make_bool(false)));
  append(out.cmds, builder.block(p.cmds));
  return out;
}

}  // namespace

TargetProgram sps(const SourceProgram& p) { return sps_impl(p, SpectreVariant::V1); }
TargetProgram sps_v4(const SourceProgram& p) { return sps_impl(p, SpectreVariant::V4); }

// ---------------------------------------------------------------------------
// Trace correspondence

Trace t_obs(const Trace& trace, const Directives& dirs) {
  Trace out;
  out.reserve(trace.size() * 2);
  size_t di = 0;
  for (const Obs& o : trace) {
    if (o.kind == Obs::Kind::Branch) {
      while (di < dirs.size() && dirs[di].kind != Directive::Kind::Force) ++di;
      if (di >= dirs.size()) {
        throw std::invalid_argument("t_obs: directive stream has too few branch directives");
      }
      out.push_back(o);
      out.push_back(Obs::mk_branch(dirs[di].force));
      ++di;
    } else {
      out.push_back(o);
    }
  }
  return out;
}

Trace t_obs_inv(const Trace& trace) {
  Trace out;
  for (size_t i = 0; i < trace.size(); ++i) {
    out.push_back(trace[i]);
    if (trace[i].kind == Obs::Kind::Branch && i + 1 < trace.size() &&
        trace[i + 1].kind == Obs::Kind::Branch) {
      ++i;  // drop the directive echo
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assertion elimination

namespace {

bool may_set_ret(const CmdPtr& c);

bool may_set_ret(const Block& b) {
  for (const auto& c : b) {
    if (may_set_ret(c)) return true;
  }
  return false;
}

bool may_set_ret(const CmdPtr& c) {
  switch (c->kind) {
    case Cmd::Kind::Assert: return true;
    case Cmd::Kind::If: return may_set_ret(c->body1) || may_set_ret(c->body2);
    case Cmd::Kind::While: return may_set_ret(c->body1);
    default: return false;
  }
}

Block elim_block(const Block& b) {
  Block out;
  for (size_t i = 0; i < b.size(); ++i) {
    const CmdPtr& c = b[i];
    switch (c->kind) {
      case Cmd::Kind::Assert:
        out.push_back(cmd_assign("ret", or_of(var_ret(), not_of(c->e1))));
        break;
      case Cmd::Kind::If:
        out.push_back(cmd_if(c->e1, elim_block(c->body1), elim_block(c->body2)));
        break;
      case Cmd::Kind::While:
        if (may_set_ret(c->body1)) {
          out.push_back(cmd_while(and_of(not_of(var_ret()), c->e1), elim_block(c->body1)));
        } else {
          out.push_back(c);
        }
        break;
      default:
        out.push_back(c);
        break;
    }
    // Once a command can record a failure, the rest of the block runs only
    // while no failure has been recorded.
    if (may_set_ret(c) && i + 1 < b.size()) {
      Block rest(b.begin() + static_cast<std::ptrdiff_t>(i) + 1, b.end());
      out.push_back(cmd_if(not_of(var_ret()), elim_block(rest), {}));
      return out;
    }
  }
  return out;
}

}  // namespace

TargetProgram assert_elim(const TargetProgram& p) {
  std::set<std::string> vars;
  collect_vars(p.cmds, vars);
  if (vars.count("ret")) {
    throw TransformError("assert elimination input already uses 'ret'");
  }
  TargetProgram out;
  out.cmds.push_back(cmd_assign("ret", make_bool(false)));
  append(out.cmds, elim_block(p.cmds));
  return out;
}

// ---------------------------------------------------------------------------
// Leak instrumentation

namespace {

class Instrumenter {
public:
  explicit Instrumenter(const LeakageModel& model) : model_(model) {}

  Block block(const Block& b) {
    Block out;
    for (const auto& c : b) cmd(c, out);
    return out;
  }

private:
  ExprPtr laddr_expr(const ExprPtr& addr) const {
    if (model_.kind == LeakKind::CacheLine) {
      return make_bin(BinOp::Div, addr, make_int(model_.line_size));
    }
    return addr;
  }

  static ExprPtr branch_record(const ExprPtr& cond) {
    return make_select(cond, make_int(1), make_int(0));
  }

  // obs = obs ++ [tag, payload...];
  static CmdPtr append_obs(std::vector<ExprPtr> items) {
    return cmd_assign("obs", make_append(var_obs(), std::move(items)));
  }

  // obs = ret ? obs : obs ++ [tag, payload...];   (silent once ret is set)
  static CmdPtr append_obs_live(std::vector<ExprPtr> items) {
    return cmd_assign(
        "obs", make_select(var_ret(), var_obs(), make_append(var_obs(), std::move(items))));
  }

  void cmd(const CmdPtr& c, Block& out) {
    switch (c->kind) {
      case Cmd::Kind::Skip:
      case Cmd::Kind::ClearMem:
        out.push_back(c);
        return;
      case Cmd::Kind::Assign:
        if (model_.leaks_division() && c->e1->kind == Expr::Kind::Binary &&
            c->e1->bin == BinOp::Div) {
          out.push_back(append_obs({make_int(2), make_un(UnOp::Log2, c->e1->a),
                                    make_un(UnOp::Log2, c->e1->b)}));
        }
        out.push_back(c);
        return;
      case Cmd::Kind::Load:
      case Cmd::Kind::Store:
      case Cmd::Kind::IndexedLoad:
      case Cmd::Kind::AppendStore:
        out.push_back(append_obs({make_int(1), laddr_expr(c->e1)}));
        out.push_back(c);
        return;
      case Cmd::Kind::If:
        if (is_ghost_guard_cond(c->e1)) {
          out.push_back(cmd_if(c->e1, block(c->body1), block(c->body2)));
        } else {
          out.push_back(append_obs({make_int(0), branch_record(c->e1)}));
          out.push_back(cmd_if(c->e1, block(c->body1), block(c->body2)));
        }
        return;
      case Cmd::Kind::While: {
        if (ExprPtr real = ghost_while_real_cond(c->e1)) {
          CmdPtr head = append_obs_live({make_int(0), branch_record(real)});
          out.push_back(head);
          Block body = block(c->body1);
          body.push_back(head);
          out.push_back(cmd_while(c->e1, std::move(body)));
        } else {
          CmdPtr head = append_obs({make_int(0), branch_record(c->e1)});
          out.push_back(head);
          Block body = block(c->body1);
          body.push_back(head);
          out.push_back(cmd_while(c->e1, std::move(body)));
        }
        return;
      }
      case Cmd::Kind::Assert:
        throw TransformError(
            "leak instrumentation requires an assert-free program; apply assert-elim first");
      case Cmd::Kind::InitMsf:
      case Cmd::Kind::UpdateMsf:
      case Cmd::Kind::Protect:
        throw TransformError("source-only command in target program");
    }
  }

  const LeakageModel& model_;
};

}  // namespace

TargetProgram leak_instrument(const TargetProgram& p, const LeakageModel& model) {
  std::set<std::string> vars;
  collect_vars(p.cmds, vars);
  if (vars.count("obs")) {
    throw TransformError("leak instrumentation input already uses 'obs'");
  }
  Instrumenter instr(model);
  TargetProgram out;
  out.cmds.push_back(cmd_assign("obs", make_list({})));
  append(out.cmds, instr.block(p.cmds));
  return out;
}

Trace decode_obs(const Value& obs) {
  if (!obs.is_list()) throw std::invalid_argument("decode_obs: not a list");
  const auto& xs = obs.as_list();
  size_t i = 0;
  auto take_int = [&]() -> const Int& {
    if (i >= xs.size() || !xs[i].is_int()) {
      throw std::invalid_argument("decode_obs: malformed record");
    }
    return xs[i++].as_int();
  };
  Trace out;
  while (i < xs.size()) {
    Int tag = take_int();
    if (tag == 0) {
      out.push_back(Obs::mk_branch(take_int() != 0));
    } else if (tag == 1) {
      out.push_back(Obs::mk_addr(take_int()));
    } else if (tag == 2) {
      Int a = take_int();
      Int b = take_int();
      out.push_back(Obs::mk_op({std::move(a), std::move(b)}));
    } else {
      throw std::invalid_argument("decode_obs: unknown tag");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variable retagging and self-composition

namespace {

ExprPtr rtag_expr(const ExprPtr& e, const std::string& suffix) {
  switch (e->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
      return e;
    case Expr::Kind::Var:
      return make_var(e->name + suffix);
    case Expr::Kind::Head:
      return make_head(e->name + suffix);
    case Expr::Kind::Tail:
      return make_tail(e->name + suffix);
    case Expr::Kind::Unary:
      return make_un(e->un, rtag_expr(e->a, suffix));
    case Expr::Kind::Binary:
      return make_bin(e->bin, rtag_expr(e->a, suffix), rtag_expr(e->b, suffix));
    case Expr::Kind::Select:
      return make_select(rtag_expr(e->a, suffix), rtag_expr(e->b, suffix),
                         rtag_expr(e->c, suffix));
    case Expr::Kind::ListLit:
    case Expr::Kind::Append: {
      std::vector<ExprPtr> items;
      items.reserve(e->items.size());
      for (const auto& it : e->items) items.push_back(rtag_expr(it, suffix));
      if (e->kind == Expr::Kind::ListLit) return make_list(std::move(items));
      return make_append(rtag_expr(e->a, suffix), std::move(items));
    }
  }
  return e;
}

Block rtag_block(const Block& b, const std::string& suffix);

CmdPtr rtag_cmd(const CmdPtr& c, const std::string& suffix) {
  auto r = [&](const ExprPtr& e) { return e ? rtag_expr(e, suffix) : e; };
  switch (c->kind) {
    case Cmd::Kind::Skip:
    case Cmd::Kind::ClearMem:
    case Cmd::Kind::InitMsf:
      return c;
    case Cmd::Kind::Assign:
      return cmd_assign(c->var + suffix, r(c->e1));
    case Cmd::Kind::Load:
      return cmd_load(c->var + suffix, r(c->e1));
    case Cmd::Kind::Store:
      return cmd_store(r(c->e1), c->var + suffix);
    case Cmd::Kind::UpdateMsf:
      return cmd_update_msf(r(c->e1));
    case Cmd::Kind::Protect:
      return cmd_protect(c->var + suffix, r(c->e1));
    case Cmd::Kind::If:
      return cmd_if(r(c->e1), rtag_block(c->body1, suffix), rtag_block(c->body2, suffix));
    case Cmd::Kind::While:
      return cmd_while(r(c->e1), rtag_block(c->body1, suffix));
    case Cmd::Kind::Assert:
      return cmd_assert(r(c->e1));
    case Cmd::Kind::IndexedLoad:
      return cmd_indexed_load(c->var + suffix, r(c->e1), r(c->e2));
    case Cmd::Kind::AppendStore:
      return cmd_append_store(r(c->e1), c->var + suffix);
  }
  return c;
}

Block rtag_block(const Block& b, const std::string& suffix) {
  Block out;
  out.reserve(b.size());
  for (const auto& c : b) out.push_back(rtag_cmd(c, suffix));
  return out;
}

class ProductBuilder {
public:
  ProductBuilder(const LeakageModel& model, Int offset)
      : model_(model), offset_(std::move(offset)) {}

  Block block(const Block& b) {
    Block out;
    for (const auto& c : b) cmd(c, out);
    return out;
  }

private:
  ExprPtr r1(const ExprPtr& e) const { return rtag_expr(e, "_1"); }
  ExprPtr r2(const ExprPtr& e) const { return rtag_expr(e, "_2"); }
  // Copy 2 lives in its own memory region.
  ExprPtr r2mem(const ExprPtr& e) const {
    return make_bin(BinOp::Add, r2(e), make_int(offset_));
  }
  ExprPtr laddr_of(ExprPtr e) const {
    if (model_.kind == LeakKind::CacheLine) {
      return make_bin(BinOp::Div, std::move(e), make_int(model_.line_size));
    }
    return e;
  }
  // assert laddr(e@1) == laddr(e@2);
  CmdPtr assert_addr(const ExprPtr& e) const {
    return cmd_assert(eq_of(laddr_of(r1(e)), laddr_of(r2(e))));
  }
  CmdPtr assert_cond(const ExprPtr& e) const { return cmd_assert(eq_of(r1(e), r2(e))); }
  // assert ret_1 || (e@1 == e@2);   (ghost loops leak only while live)
  CmdPtr assert_cond_live(const ExprPtr& e) const {
    return cmd_assert(or_of(make_var("ret_1"), eq_of(r1(e), r2(e))));
  }

  void cmd(const CmdPtr& c, Block& out) {
    switch (c->kind) {
      case Cmd::Kind::Skip:
        out.push_back(c);
        return;
      case Cmd::Kind::Assign:
        if (model_.leaks_division() && c->e1->kind == Expr::Kind::Binary &&
            c->e1->bin == BinOp::Div) {
          out.push_back(cmd_assert(
              and_of(eq_of(make_un(UnOp::Log2, r1(c->e1->a)), make_un(UnOp::Log2, r2(c->e1->a))),
                     eq_of(make_un(UnOp::Log2, r1(c->e1->b)),
                           make_un(UnOp::Log2, r2(c->e1->b))))));
        }
        out.push_back(cmd_assign(c->var + "_1", r1(c->e1)));
        out.push_back(cmd_assign(c->var + "_2", r2(c->e1)));
        return;
      case Cmd::Kind::Load:
        out.push_back(assert_addr(c->e1));
        out.push_back(cmd_load(c->var + "_1", r1(c->e1)));
        out.push_back(cmd_load(c->var + "_2", r2mem(c->e1)));
        return;
      case Cmd::Kind::Store:
        out.push_back(assert_addr(c->e1));
        out.push_back(cmd_store(r1(c->e1), c->var + "_1"));
        out.push_back(cmd_store(r2mem(c->e1), c->var + "_2"));
        return;
      case Cmd::Kind::IndexedLoad:
        out.push_back(assert_addr(c->e1));
        out.push_back(cmd_indexed_load(c->var + "_1", r1(c->e1), r1(c->e2)));
        out.push_back(cmd_indexed_load(c->var + "_2", r2mem(c->e1), r2(c->e2)));
        return;
      case Cmd::Kind::AppendStore:
        out.push_back(assert_addr(c->e1));
        out.push_back(cmd_append_store(r1(c->e1), c->var + "_1"));
        out.push_back(cmd_append_store(r2mem(c->e1), c->var + "_2"));
        return;
      case Cmd::Kind::ClearMem:
        out.push_back(c);  // collapses both regions at once
        return;
      case Cmd::Kind::If:
        if (is_ghost_guard_cond(c->e1)) {
          out.push_back(cmd_if(r1(c->e1), block(c->body1), block(c->body2)));
        } else {
          out.push_back(assert_cond(c->e1));
          out.push_back(cmd_if(r1(c->e1), block(c->body1), block(c->body2)));
        }
        return;
      case Cmd::Kind::While:
        if (ExprPtr real = ghost_while_real_cond(c->e1)) {
          out.push_back(assert_cond_live(real));
          Block body = block(c->body1);
          body.push_back(assert_cond_live(real));
          out.push_back(cmd_while(r1(c->e1), std::move(body)));
        } else {
          out.push_back(assert_cond(c->e1));
          Block body = block(c->body1);
          body.push_back(assert_cond(c->e1));
          out.push_back(cmd_while(r1(c->e1), std::move(body)));
        }
        return;
      case Cmd::Kind::Assert:
        throw TransformError(
            "self-composition requires an assert-free program; apply assert-elim first");
      case Cmd::Kind::InitMsf:
      case Cmd::Kind::UpdateMsf:
      case Cmd::Kind::Protect:
        throw TransformError("source-only command in target program");
    }
  }

  const LeakageModel& model_;
  Int offset_;
};

}  // namespace

TargetProgram rtag(const TargetProgram& p, const std::string& suffix) {
  TargetProgram out;
  out.cmds = rtag_block(p.cmds, suffix);
  return out;
}

TargetProgram product(const TargetProgram& p, const LeakageModel& model, const Int& offset) {
  ProductBuilder builder(model, offset);
  TargetProgram out;
  out.cmds = builder.block(p.cmds);
  return out;
}

}  // namespace sps
