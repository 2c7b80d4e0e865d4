// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/ast.hpp"

#include <algorithm>
#include <sstream>

namespace sps {

Int floor_div(const Int& n, const Int& d) {
  Int q = n / d;  // truncated
  if ((n % d != 0) && ((n < 0) != (d < 0))) q -= 1;
  return q;
}

Int floor_mod(const Int& n, const Int& d) { return n - d * floor_div(n, d); }

Int bit_log2(const Int& v) {
  if (v <= 1) return 0;
  return Int(boost::multiprecision::msb(v));
}

const char* Value::type_name() const {
  if (is_int()) return "int";
  if (is_bool()) return "bool";
  return "list";
}

std::string Value::to_string() const {
  if (is_int()) return as_int().str();
  if (is_bool()) return as_bool() ? "true" : "false";
  std::ostringstream os;
  os << "[";
  const auto& xs = as_list();
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    os << xs[i].to_string();
  }
  os << "]";
  return os.str();
}

const char* unop_spelling(UnOp op) {
  switch (op) {
    case UnOp::Not: return "!";
    case UnOp::Neg: return "-";
    case UnOp::Log2: return "log2";
  }
  return "?";
}

const char* binop_spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

namespace {
std::shared_ptr<Expr> blank(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}
}  // namespace

ExprPtr make_int(Int v) {
  auto e = blank(Expr::Kind::IntLit);
  e->ival = std::move(v);
  return e;
}
ExprPtr make_int(long long v) { return make_int(Int(v)); }
ExprPtr make_bool(bool b) {
  auto e = blank(Expr::Kind::BoolLit);
  e->bval = b;
  return e;
}
ExprPtr make_var(std::string name) {
  auto e = blank(Expr::Kind::Var);
  e->name = std::move(name);
  return e;
}
ExprPtr make_un(UnOp op, ExprPtr a) {
  auto e = blank(Expr::Kind::Unary);
  e->un = op;
  e->a = std::move(a);
  return e;
}
ExprPtr make_bin(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = blank(Expr::Kind::Binary);
  e->bin = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
ExprPtr make_select(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
  auto e = blank(Expr::Kind::Select);
  e->a = std::move(cond);
  e->b = std::move(then_e);
  e->c = std::move(else_e);
  return e;
}
ExprPtr make_head(std::string name) {
  auto e = blank(Expr::Kind::Head);
  e->name = std::move(name);
  return e;
}
ExprPtr make_tail(std::string name) {
  auto e = blank(Expr::Kind::Tail);
  e->name = std::move(name);
  return e;
}
ExprPtr make_list(std::vector<ExprPtr> items) {
  auto e = blank(Expr::Kind::ListLit);
  e->items = std::move(items);
  return e;
}
ExprPtr make_append(ExprPtr base, std::vector<ExprPtr> items) {
  auto e = blank(Expr::Kind::Append);
  e->a = std::move(base);
  e->items = std::move(items);
  return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::IntLit: return a->ival == b->ival;
    case Expr::Kind::BoolLit: return a->bval == b->bval;
    case Expr::Kind::Var:
    case Expr::Kind::Head:
    case Expr::Kind::Tail: return a->name == b->name;
    case Expr::Kind::Unary: return a->un == b->un && expr_equal(a->a, b->a);
    case Expr::Kind::Binary:
      return a->bin == b->bin && expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
    case Expr::Kind::Select:
      return expr_equal(a->a, b->a) && expr_equal(a->b, b->b) && expr_equal(a->c, b->c);
    case Expr::Kind::ListLit:
    case Expr::Kind::Append: {
      if (a->items.size() != b->items.size()) return false;
      if (a->kind == Expr::Kind::Append && !expr_equal(a->a, b->a)) return false;
      for (size_t i = 0; i < a->items.size(); ++i)
        if (!expr_equal(a->items[i], b->items[i])) return false;
      return true;
    }
  }
  return false;
}

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Head:
    case Expr::Kind::Tail: out.insert(e->name); break;
    default: break;
  }
  collect_vars(e->a, out);
  collect_vars(e->b, out);
  collect_vars(e->c, out);
  for (const auto& it : e->items) collect_vars(it, out);
}

namespace {
std::shared_ptr<Cmd> blank_cmd(Cmd::Kind k) {
  auto c = std::make_shared<Cmd>();
  c->kind = k;
  return c;
}
}  // namespace

CmdPtr cmd_skip() { return blank_cmd(Cmd::Kind::Skip); }
CmdPtr cmd_assign(std::string var, ExprPtr e) {
  auto c = blank_cmd(Cmd::Kind::Assign);
  c->var = std::move(var);
  c->e1 = std::move(e);
  return c;
}
CmdPtr cmd_load(std::string var, ExprPtr addr) {
  auto c = blank_cmd(Cmd::Kind::Load);
  c->var = std::move(var);
  c->e1 = std::move(addr);
  return c;
}
CmdPtr cmd_store(ExprPtr addr, std::string var) {
  auto c = blank_cmd(Cmd::Kind::Store);
  c->var = std::move(var);
  c->e1 = std::move(addr);
  return c;
}
CmdPtr cmd_init_msf() { return blank_cmd(Cmd::Kind::InitMsf); }
CmdPtr cmd_update_msf(ExprPtr e) {
  auto c = blank_cmd(Cmd::Kind::UpdateMsf);
  c->e1 = std::move(e);
  return c;
}
CmdPtr cmd_protect(std::string var, ExprPtr e) {
  auto c = blank_cmd(Cmd::Kind::Protect);
  c->var = std::move(var);
  c->e1 = std::move(e);
  return c;
}
CmdPtr cmd_if(ExprPtr cond, Block then_b, Block else_b) {
  auto c = blank_cmd(Cmd::Kind::If);
  c->e1 = std::move(cond);
  c->body1 = std::move(then_b);
  c->body2 = std::move(else_b);
  return c;
}
CmdPtr cmd_while(ExprPtr cond, Block body) {
  auto c = blank_cmd(Cmd::Kind::While);
  c->e1 = std::move(cond);
  c->body1 = std::move(body);
  return c;
}
CmdPtr cmd_assert(ExprPtr e) {
  auto c = blank_cmd(Cmd::Kind::Assert);
  c->e1 = std::move(e);
  return c;
}
CmdPtr cmd_indexed_load(std::string var, ExprPtr addr, ExprPtr index) {
  auto c = blank_cmd(Cmd::Kind::IndexedLoad);
  c->var = std::move(var);
  c->e1 = std::move(addr);
  c->e2 = std::move(index);
  return c;
}
CmdPtr cmd_append_store(ExprPtr addr, std::string var) {
  auto c = blank_cmd(Cmd::Kind::AppendStore);
  c->var = std::move(var);
  c->e1 = std::move(addr);
  return c;
}
CmdPtr cmd_clear_mem() { return blank_cmd(Cmd::Kind::ClearMem); }
CmdPtr cmd_leak(ExprPtr e) { return cmd_if(std::move(e), {}, {}); }

bool is_reserved_name(const std::string& name) {
  return name == "dir" || name == "ms" || name == "obs" || name == "ret";
}

const std::vector<std::string>& reserved_names() {
  static const std::vector<std::string> names = {"dir", "ms", "obs", "ret"};
  return names;
}

void collect_vars(const Block& b, std::set<std::string>& out) {
  for (const auto& c : b) {
    if (!c) continue;
    if (!c->var.empty()) out.insert(c->var);
    collect_vars(c->e1, out);
    collect_vars(c->e2, out);
    collect_vars(c->body1, out);
    collect_vars(c->body2, out);
  }
}

namespace {

void expr_reads(const ExprPtr& e, const std::set<std::string>& bound,
                std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Var || e->kind == Expr::Kind::Head ||
      e->kind == Expr::Kind::Tail) {
    if (bound.find(e->name) == bound.end()) out.insert(e->name);
  }
  expr_reads(e->a, bound, out);
  expr_reads(e->b, bound, out);
  expr_reads(e->c, bound, out);
  for (const auto& item : e->items) expr_reads(item, bound, out);
}

// Writes inside branches and loop bodies do not escape (the body may not
// run), so a variable counts as free if any path can read it first.
void block_reads(const Block& b, std::set<std::string> bound, std::set<std::string>& out) {
  for (const auto& c : b) {
    if (!c) continue;
    switch (c->kind) {
      case Cmd::Kind::Skip:
      case Cmd::Kind::InitMsf:
      case Cmd::Kind::ClearMem: break;
      case Cmd::Kind::Assign:
      case Cmd::Kind::Protect:
      case Cmd::Kind::Load:
        expr_reads(c->e1, bound, out);
        bound.insert(c->var);
        break;
      case Cmd::Kind::IndexedLoad:
        expr_reads(c->e1, bound, out);
        expr_reads(c->e2, bound, out);
        bound.insert(c->var);
        break;
      case Cmd::Kind::Store:
      case Cmd::Kind::AppendStore:
        expr_reads(c->e1, bound, out);
        if (bound.find(c->var) == bound.end()) out.insert(c->var);
        break;
      case Cmd::Kind::UpdateMsf:
      case Cmd::Kind::Assert:
        expr_reads(c->e1, bound, out);
        break;
      case Cmd::Kind::If:
        expr_reads(c->e1, bound, out);
        block_reads(c->body1, bound, out);
        block_reads(c->body2, bound, out);
        break;
      case Cmd::Kind::While:
        expr_reads(c->e1, bound, out);
        block_reads(c->body1, bound, out);
        break;
    }
  }
}

}  // namespace

std::set<std::string> free_vars(const Block& b) {
  std::set<std::string> out;
  block_reads(b, {}, out);
  return out;
}

bool block_contains(const Block& b, Cmd::Kind kind) {
  for (const auto& c : b) {
    if (c->kind == kind) return true;
    if (block_contains(c->body1, kind) || block_contains(c->body2, kind)) return true;
  }
  return false;
}

std::string dirs_to_string(const Directives& ds) {
  std::ostringstream os;
  for (const auto& d : ds) {
    if (d.kind == Directive::Kind::Force)
      os << (d.force ? 'T' : 'F');
    else
      os << 'L' << d.index.str();
  }
  return os.str();
}

Directives dirs_from_string(const std::string& s) {
  Directives out;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == 'T' || c == 't') {
      out.push_back(Directive::force_of(true));
      ++i;
    } else if (c == 'F' || c == 'f') {
      out.push_back(Directive::force_of(false));
      ++i;
    } else if (c == 'L' || c == 'l') {
      size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j == i + 1) throw std::runtime_error("directive string: 'L' needs an index");
      out.push_back(Directive::load_of(Int(s.substr(i + 1, j - i - 1))));
      i = j;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      throw std::runtime_error(std::string("directive string: unexpected character '") + c + "'");
    }
  }
  return out;
}

std::string Obs::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Branch: os << "branch " << (branch ? "true" : "false"); break;
    case Kind::Addr: os << "addr " << addr.str(); break;
    case Kind::Op: {
      os << "op [";
      for (size_t i = 0; i < op_sizes.size(); ++i) {
        if (i) os << ", ";
        os << op_sizes[i].str();
      }
      os << "]";
      break;
    }
  }
  return os.str();
}

std::string trace_to_string(const Trace& t) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) os << "; ";
    os << t[i].to_string();
  }
  os << "]";
  return os.str();
}

std::string LeakageModel::name() const {
  switch (kind) {
    case LeakKind::Baseline: return "baseline";
    case LeakKind::CacheLine: return "cacheline";
    case LeakKind::VarTime: return "vartime";
  }
  return "?";
}

LeakageModel LeakageModel::baseline() { return LeakageModel{}; }

LeakageModel LeakageModel::cacheline(Int line) {
  LeakageModel m;
  m.kind = LeakKind::CacheLine;
  m.line_size = std::move(line);
  return m;
}

LeakageModel LeakageModel::vartime() {
  LeakageModel m;
  m.kind = LeakKind::VarTime;
  return m;
}

LeakageModel LeakageModel::from_name(const std::string& name, Int line) {
  if (name == "baseline") return baseline();
  if (name == "cacheline") return cacheline(std::move(line));
  if (name == "vartime") return vartime();
  throw std::runtime_error("unknown leakage model: " + name);
}

std::string variant_name(SpectreVariant v) { return v == SpectreVariant::V1 ? "v1" : "v4"; }

SpectreVariant variant_from_name(const std::string& s) {
  if (s == "v1") return SpectreVariant::V1;
  if (s == "v4") return SpectreVariant::V4;
  throw std::runtime_error("unknown spectre variant: " + s);
}

}  // namespace sps
