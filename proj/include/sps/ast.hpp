// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Core data types: values, expressions, commands, directives, observations
// and leakage models shared by the interpreters, transforms and checkers.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sps {

using Int = boost::multiprecision::cpp_int;

// Floor division / Euclidean remainder. For d > 0 the remainder is always in
// [0, d), which is what makes syntactically wrapped addresses (e mod N) valid.
Int floor_div(const Int& n, const Int& d);
Int floor_mod(const Int& n, const Int& d);

// floor(log2(max(v, 1))) — the operand-size measure used by the
// variable-time leakage model.
Int bit_log2(const Int& v);

// ---------------------------------------------------------------------------
// Values

class Value {
public:
  using List = std::vector<Value>;

  Value() : rep_(Int(0)) {}
  Value(Int v) : rep_(std::move(v)) {}  // NOLINT: implicit by design
  Value(bool b) : rep_(b) {}            // NOLINT
  Value(List xs) : rep_(std::move(xs)) {}
  static Value of_int(long long v) { return Value(Int(v)); }

  bool is_int() const { return std::holds_alternative<Int>(rep_); }
  bool is_bool() const { return std::holds_alternative<bool>(rep_); }
  bool is_list() const { return std::holds_alternative<List>(rep_); }

  const Int& as_int() const { return std::get<Int>(rep_); }
  bool as_bool() const { return std::get<bool>(rep_); }
  const List& as_list() const { return std::get<List>(rep_); }
  List& as_list() { return std::get<List>(rep_); }

  const char* type_name() const;
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b) { return a.rep_ == b.rep_; }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
  std::variant<Int, bool, List> rep_;
};

// ---------------------------------------------------------------------------
// Expressions

enum class UnOp { Not, Neg, Log2 };
enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Eq, Ne, And, Or };

const char* unop_spelling(UnOp op);
const char* binop_spelling(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    IntLit,
    BoolLit,
    Var,
    Unary,
    Binary,
    Select,   // a ? b : c   (non-leaking conditional; only the taken arm is evaluated)
    Head,     // hd(name)
    Tail,     // tl(name)
    ListLit,  // [e1, ..., en]
    Append,   // a ++ [e1, ..., en]
  };

  Kind kind;
  Int ival;
  bool bval = false;
  std::string name;  // Var / Head / Tail
  UnOp un = UnOp::Not;
  BinOp bin = BinOp::Add;
  ExprPtr a, b, c;
  std::vector<ExprPtr> items;  // ListLit / Append
};

ExprPtr make_int(Int v);
ExprPtr make_int(long long v);
ExprPtr make_bool(bool b);
ExprPtr make_var(std::string name);
ExprPtr make_un(UnOp op, ExprPtr a);
ExprPtr make_bin(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr make_select(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
ExprPtr make_head(std::string name);
ExprPtr make_tail(std::string name);
ExprPtr make_list(std::vector<ExprPtr> items);
ExprPtr make_append(ExprPtr base, std::vector<ExprPtr> items);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);
void collect_vars(const ExprPtr& e, std::set<std::string>& out);

// ---------------------------------------------------------------------------
// Commands and programs

struct Cmd;
using CmdPtr = std::shared_ptr<const Cmd>;
using Block = std::vector<CmdPtr>;

struct Cmd {
  enum class Kind {
    Skip,
    Assign,       // var = e1
    Load,         // var <- [e1]
    Store,        // [e1] <- var
    InitMsf,      // init_msf
    UpdateMsf,    // update_msf e1
    Protect,      // var = protect(e1)
    If,           // if e1 { body1 } else { body2 }
    While,        // while e1 { body1 }
    Assert,       // assert e1
    IndexedLoad,  // var <- [e1] @ e2
    AppendStore,  // [e1] <+ var
    ClearMem,     // clear_mem
  };

  Kind kind;
  std::string var;
  ExprPtr e1, e2;
  Block body1, body2;
  int line = 0, col = 0;
};

CmdPtr cmd_skip();
CmdPtr cmd_assign(std::string var, ExprPtr e);
CmdPtr cmd_load(std::string var, ExprPtr addr);
CmdPtr cmd_store(ExprPtr addr, std::string var);
CmdPtr cmd_init_msf();
CmdPtr cmd_update_msf(ExprPtr e);
CmdPtr cmd_protect(std::string var, ExprPtr e);
CmdPtr cmd_if(ExprPtr cond, Block then_b, Block else_b);
CmdPtr cmd_while(ExprPtr cond, Block body);
CmdPtr cmd_assert(ExprPtr e);
CmdPtr cmd_indexed_load(std::string var, ExprPtr addr, ExprPtr index);
CmdPtr cmd_append_store(ExprPtr addr, std::string var);
CmdPtr cmd_clear_mem();
CmdPtr cmd_leak(ExprPtr e);  // sugar: if e {} else {}

// Distinct program types so the transform signatures document which dialect
// they expect. A source program uses the speculative-semantics command set;
// a target program is what the transforms produce / the sequential
// interpreter runs.
struct SourceProgram {
  Block cmds;
};
struct TargetProgram {
  Block cmds;
};

// Names with a fixed meaning in transformed programs. Source programs may not
// bind or read them.
bool is_reserved_name(const std::string& name);
const std::vector<std::string>& reserved_names();

void collect_vars(const Block& b, std::set<std::string>& out);
// Variables some execution path can read before writing (program inputs).
std::set<std::string> free_vars(const Block& b);
bool block_contains(const Block& b, Cmd::Kind kind);

// ---------------------------------------------------------------------------
// Directives and observations

struct Directive {
  enum class Kind { Force, Load };
  Kind kind = Kind::Force;
  bool force = false;  // Force payload
  Int index;           // Load payload

  static Directive force_of(bool b) {
    Directive d;
    d.kind = Kind::Force;
    d.force = b;
    return d;
  }
  static Directive load_of(Int n) {
    Directive d;
    d.kind = Kind::Load;
    d.index = std::move(n);
    return d;
  }

  friend bool operator==(const Directive& a, const Directive& b) {
    if (a.kind != b.kind) return false;
    return a.kind == Kind::Force ? a.force == b.force : a.index == b.index;
  }
  friend bool operator!=(const Directive& a, const Directive& b) { return !(a == b); }
  friend bool operator<(const Directive& a, const Directive& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.kind == Kind::Force ? a.force < b.force : a.index < b.index;
  }
};
using Directives = std::vector<Directive>;

// Compact textual form: 'T'/'F' for branch directives, 'L<n>' for load
// directives, no separators ("FTTL0").
std::string dirs_to_string(const Directives& ds);
Directives dirs_from_string(const std::string& s);

struct Obs {
  enum class Kind { Branch, Addr, Op };
  Kind kind = Kind::Branch;
  bool branch = false;
  Int addr;
  std::vector<Int> op_sizes;

  static Obs mk_branch(bool b) {
    Obs o;
    o.kind = Kind::Branch;
    o.branch = b;
    return o;
  }
  static Obs mk_addr(Int i) {
    Obs o;
    o.kind = Kind::Addr;
    o.addr = std::move(i);
    return o;
  }
  static Obs mk_op(std::vector<Int> sizes) {
    Obs o;
    o.kind = Kind::Op;
    o.op_sizes = std::move(sizes);
    return o;
  }

  std::string to_string() const;

  friend bool operator==(const Obs& a, const Obs& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Kind::Branch: return a.branch == b.branch;
      case Kind::Addr: return a.addr == b.addr;
      case Kind::Op: return a.op_sizes == b.op_sizes;
    }
    return false;
  }
  friend bool operator!=(const Obs& a, const Obs& b) { return !(a == b); }
};
using Trace = std::vector<Obs>;

std::string trace_to_string(const Trace& t);

// ---------------------------------------------------------------------------
// Leakage models

enum class LeakKind { Baseline, CacheLine, VarTime };

struct LeakageModel {
  LeakKind kind = LeakKind::Baseline;
  Int line_size = 64;  // CacheLine granule

  // Address abstraction applied to every memory observation.
  Int laddr(const Int& i) const {
    if (kind == LeakKind::CacheLine) return floor_div(i, line_size);
    return i;
  }
  // Operand-size leak for an assignment whose right-hand side is a
  // (top-level) division; empty for every other model/shape.
  bool leaks_division() const { return kind == LeakKind::VarTime; }

  std::string name() const;
  static LeakageModel baseline();
  static LeakageModel cacheline(Int line = 64);
  static LeakageModel vartime();
  static LeakageModel from_name(const std::string& name, Int line = 64);
};

enum class SpectreVariant { V1, V4 };

std::string variant_name(SpectreVariant v);
SpectreVariant variant_from_name(const std::string& s);

}  // namespace sps
