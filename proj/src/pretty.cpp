// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/pretty.hpp"

#include <sstream>

namespace sps {

namespace {

// Precedence levels, loose to tight. A child is parenthesized when its level
// is below the minimum its context requires.
enum Level {
  kSelect = 0,
  kOr = 1,
  kAnd = 2,
  kCmp = 3,
  kAdd = 4,
  kMul = 5,
  kUnary = 6,
  kPostfix = 7,
  kPrimary = 8,
};

int level_of(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Select: return kSelect;
    case Expr::Kind::Binary:
      switch (e->bin) {
        case BinOp::Or: return kOr;
        case BinOp::And: return kAnd;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Eq:
        case BinOp::Ne: return kCmp;
        case BinOp::Add:
        case BinOp::Sub: return kAdd;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return kMul;
      }
      return kPrimary;
    case Expr::Kind::Unary: return e->un == UnOp::Log2 ? kPrimary : kUnary;
    case Expr::Kind::Append: return kPostfix;
    default: return kPrimary;
  }
}

void pp(std::ostream& os, const ExprPtr& e, int min_level);

void pp_list(std::ostream& os, const std::vector<ExprPtr>& items) {
  os << "[";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) os << ", ";
    pp(os, items[i], kSelect);
  }
  os << "]";
}

void pp(std::ostream& os, const ExprPtr& e, int min_level) {
  bool parens = level_of(e) < min_level;
  if (parens) os << "(";
  switch (e->kind) {
    case Expr::Kind::IntLit: os << e->ival.str(); break;
    case Expr::Kind::BoolLit: os << (e->bval ? "true" : "false"); break;
    case Expr::Kind::Var: os << e->name; break;
    case Expr::Kind::Unary:
      if (e->un == UnOp::Log2) {
        os << "log2(";
        pp(os, e->a, kSelect);
        os << ")";
      } else {
        os << unop_spelling(e->un);
        // A negated negation needs parens ("-(-x)", not "--x").
        pp(os, e->a, e->un == UnOp::Neg ? kPostfix : kUnary);
      }
      break;
    case Expr::Kind::Binary: {
      int lv = level_of(e);
      bool left_assoc = lv == kOr || lv == kAnd || lv == kAdd || lv == kMul;
      pp(os, e->a, left_assoc ? lv : lv + 1);
      os << " " << binop_spelling(e->bin) << " ";
      pp(os, e->b, lv + 1);
      break;
    }
    case Expr::Kind::Select:
      pp(os, e->a, kOr);
      os << " ? ";
      pp(os, e->b, kSelect);
      os << " : ";
      pp(os, e->c, kSelect);
      break;
    case Expr::Kind::Head:
      os << "hd(" << e->name << ")";
      break;
    case Expr::Kind::Tail:
      os << "tl(" << e->name << ")";
      break;
    case Expr::Kind::ListLit: pp_list(os, e->items); break;
    case Expr::Kind::Append:
      pp(os, e->a, kPostfix);
      os << " ++ ";
      pp_list(os, e->items);
      break;
  }
  if (parens) os << ")";
}

void pp_block(std::ostream& os, const Block& b, int indent);

void pp_cmd(std::ostream& os, const CmdPtr& c, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  os << pad;
  switch (c->kind) {
    case Cmd::Kind::Skip: os << "skip;\n"; break;
    case Cmd::Kind::Assign:
      os << c->var << " = ";
      pp(os, c->e1, kSelect);
      os << ";\n";
      break;
    case Cmd::Kind::Load:
      os << c->var << " <- [";
      pp(os, c->e1, kSelect);
      os << "];\n";
      break;
    case Cmd::Kind::IndexedLoad:
      os << c->var << " <- [";
      pp(os, c->e1, kSelect);
      os << "] @ ";
      pp(os, c->e2, kPrimary);
      os << ";\n";
      break;
    case Cmd::Kind::Store:
      os << "[";
      pp(os, c->e1, kSelect);
      os << "] <- " << c->var << ";\n";
      break;
    case Cmd::Kind::AppendStore:
      os << "[";
      pp(os, c->e1, kSelect);
      os << "] <+ " << c->var << ";\n";
      break;
    case Cmd::Kind::InitMsf: os << "init_msf;\n"; break;
    case Cmd::Kind::UpdateMsf:
      os << "update_msf ";
      pp(os, c->e1, kSelect);
      os << ";\n";
      break;
    case Cmd::Kind::Protect:
      os << c->var << " = protect(";
      pp(os, c->e1, kSelect);
      os << ");\n";
      break;
    case Cmd::Kind::Assert:
      os << "assert ";
      pp(os, c->e1, kSelect);
      os << ";\n";
      break;
    case Cmd::Kind::ClearMem: os << "clear_mem;\n"; break;
    case Cmd::Kind::If:
      if (c->body1.empty() && c->body2.empty()) {
        os << "leak ";
        pp(os, c->e1, kSelect);
        os << ";\n";
        break;
      }
      os << "if ";
      pp(os, c->e1, kSelect);
      os << " {\n";
      pp_block(os, c->body1, indent + 1);
      os << pad << "}";
      if (!c->body2.empty()) {
        os << " else {\n";
        pp_block(os, c->body2, indent + 1);
        os << pad << "}";
      }
      os << "\n";
      break;
    case Cmd::Kind::While:
      os << "while ";
      pp(os, c->e1, kSelect);
      os << " {\n";
      pp_block(os, c->body1, indent + 1);
      os << pad << "}\n";
      break;
  }
}

void pp_block(std::ostream& os, const Block& b, int indent) {
  for (const auto& c : b) pp_cmd(os, c, indent);
}

}  // namespace

std::string pretty_expr(const ExprPtr& e) {
  std::ostringstream os;
  pp(os, e, kSelect);
  return os.str();
}

std::string pretty(const Block& program) {
  std::ostringstream os;
  pp_block(os, program, 0);
  return os.str();
}

std::string pretty(const SourceProgram& p) { return pretty(p.cmds); }
std::string pretty(const TargetProgram& p) { return pretty(p.cmds); }

}  // namespace sps
