// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/eval.hpp"

namespace sps {

namespace {

[[noreturn]] void type_error(const std::string& what) {
  throw EvalError(EvalError::Code::TypeError, what);
}

const Int& want_int(const Value& v, const char* ctx) {
  if (!v.is_int()) type_error(std::string(ctx) + ": expected int, got " + v.type_name());
  return v.as_int();
}

bool want_bool(const Value& v, const char* ctx) {
  if (!v.is_bool()) type_error(std::string(ctx) + ": expected bool, got " + v.type_name());
  return v.as_bool();
}

const Value::List& want_list(const Value& v, const char* ctx) {
  if (!v.is_list()) type_error(std::string(ctx) + ": expected list, got " + v.type_name());
  return v.as_list();
}

}  // namespace

const Value& env_get(const Env& rho, const std::string& name) {
  static const Value zero = Value(Int(0));
  auto it = rho.find(name);
  return it == rho.end() ? zero : it->second;
}

Value eval(const ExprPtr& e, const Env& rho) {
  switch (e->kind) {
    case Expr::Kind::IntLit: return Value(e->ival);
    case Expr::Kind::BoolLit: return Value(e->bval);
    case Expr::Kind::Var: return env_get(rho, e->name);

    case Expr::Kind::Unary: {
      Value v = eval(e->a, rho);
      switch (e->un) {
        case UnOp::Not: return Value(!want_bool(v, "!"));
        case UnOp::Neg: return Value(Int(-want_int(v, "unary -")));
        case UnOp::Log2: return Value(bit_log2(want_int(v, "log2")));
      }
      type_error("unknown unary operator");
    }

    case Expr::Kind::Binary: {
      // Short-circuit logical operators.
      if (e->bin == BinOp::And) {
        if (!eval_bool(e->a, rho)) return Value(false);
        return Value(eval_bool(e->b, rho));
      }
      if (e->bin == BinOp::Or) {
        if (eval_bool(e->a, rho)) return Value(true);
        return Value(eval_bool(e->b, rho));
      }
      Value va = eval(e->a, rho);
      Value vb = eval(e->b, rho);
      switch (e->bin) {
        case BinOp::Add: return Value(Int(want_int(va, "+") + want_int(vb, "+")));
        case BinOp::Sub: return Value(Int(want_int(va, "-") - want_int(vb, "-")));
        case BinOp::Mul: return Value(Int(want_int(va, "*") * want_int(vb, "*")));
        case BinOp::Div: {
          const Int& d = want_int(vb, "/");
          if (d == 0) throw EvalError(EvalError::Code::DivByZero, "division by zero");
          return Value(floor_div(want_int(va, "/"), d));
        }
        case BinOp::Mod: {
          const Int& d = want_int(vb, "%");
          if (d == 0) throw EvalError(EvalError::Code::DivByZero, "mod by zero");
          return Value(floor_mod(want_int(va, "%"), d));
        }
        case BinOp::Lt: return Value(want_int(va, "<") < want_int(vb, "<"));
        case BinOp::Le: return Value(want_int(va, "<=") <= want_int(vb, "<="));
        case BinOp::Eq:
        case BinOp::Ne: {
          if (std::string(va.type_name()) != vb.type_name())
            type_error(std::string("==/!=: mismatched types ") + va.type_name() + " vs " +
                       vb.type_name());
          bool eq = va == vb;
          return Value(e->bin == BinOp::Eq ? eq : !eq);
        }
        default: break;
      }
      type_error("unknown binary operator");
    }

    case Expr::Kind::Select: {
      // Only the selected arm is evaluated.
      return eval_bool(e->a, rho) ? eval(e->b, rho) : eval(e->c, rho);
    }

    case Expr::Kind::Head: {
      const auto& xs = want_list(env_get(rho, e->name), "hd");
      if (xs.empty()) throw EvalError(EvalError::Code::EmptyList, "hd of empty list");
      return xs.front();
    }
    case Expr::Kind::Tail: {
      const auto& xs = want_list(env_get(rho, e->name), "tl");
      if (xs.empty()) throw EvalError(EvalError::Code::EmptyList, "tl of empty list");
      return Value(Value::List(xs.begin() + 1, xs.end()));
    }

    case Expr::Kind::ListLit: {
      Value::List xs;
      xs.reserve(e->items.size());
      for (const auto& it : e->items) xs.push_back(eval(it, rho));
      return Value(std::move(xs));
    }
    case Expr::Kind::Append: {
      Value base = eval(e->a, rho);
      Value::List xs = want_list(base, "++");
      for (const auto& it : e->items) xs.push_back(eval(it, rho));
      return Value(std::move(xs));
    }
  }
  type_error("unknown expression kind");
}

bool eval_bool(const ExprPtr& e, const Env& rho) {
  Value v = eval(e, rho);
  if (!v.is_bool())
    throw EvalError(EvalError::Code::TypeError,
                    std::string("expected bool condition, got ") + v.type_name());
  return v.as_bool();
}

Int eval_int(const ExprPtr& e, const Env& rho) {
  Value v = eval(e, rho);
  if (!v.is_int())
    throw EvalError(EvalError::Code::TypeError,
                    std::string("expected int expression, got ") + v.type_name());
  return v.as_int();
}

}  // namespace sps
