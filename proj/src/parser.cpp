// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/parser.hpp"

#include <cctype>
#include <optional>
#include <unordered_set>
#include <vector>

namespace sps {

namespace {

enum class Tok {
  End,
  Ident,
  Number,
  KwIf,
  KwElse,
  KwWhile,
  KwSkip,
  KwLeak,
  KwAssert,
  KwInitMsf,
  KwUpdateMsf,
  KwProtect,
  KwClearMem,
  KwTrue,
  KwFalse,
  KwHd,
  KwTl,
  KwLog2,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Assign,      // =
  EqEq,        // ==
  Ne,          // !=
  Lt,          // <
  Le,          // <=
  ArrowLoad,   // <-
  ArrowApp,    // <+
  Not,         // !
  AndAnd,      // &&
  OrOr,        // ||
  Plus,        // +
  PlusPlus,    // ++
  Minus,       // -
  Star,        // *
  Slash,       // /
  Percent,     // %
  Question,    // ?
  Colon,       // :
  At,          // @
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

Tok keyword_kind(const std::string& s) {
  if (s == "if") return Tok::KwIf;
  if (s == "else") return Tok::KwElse;
  if (s == "while") return Tok::KwWhile;
  if (s == "skip") return Tok::KwSkip;
  if (s == "leak") return Tok::KwLeak;
  if (s == "assert") return Tok::KwAssert;
  if (s == "init_msf") return Tok::KwInitMsf;
  if (s == "update_msf") return Tok::KwUpdateMsf;
  if (s == "protect") return Tok::KwProtect;
  if (s == "clear_mem") return Tok::KwClearMem;
  if (s == "true") return Tok::KwTrue;
  if (s == "false") return Tok::KwFalse;
  if (s == "hd") return Tok::KwHd;
  if (s == "tl") return Tok::KwTl;
  if (s == "log2") return Tok::KwLog2;
  return Tok::Ident;
}

class Lexer {
public:
  explicit Lexer(std::string_view text) : src_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Token t;
      t.line = line_;
      t.col = col_;
      if (at_end()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
          t.text += get();
        t.kind = keyword_kind(t.text);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) t.text += get();
        t.kind = Tok::Number;
      } else {
        t.kind = symbol(t);
      }
      out.push_back(std::move(t));
    }
  }

private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char get() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws() {
    for (;;) {
      while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) get();
      if (peek() == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') get();
        continue;
      }
      return;
    }
  }

  Tok symbol(Token& t) {
    char c = get();
    t.text = c;
    switch (c) {
      case '(': return Tok::LParen;
      case ')': return Tok::RParen;
      case '{': return Tok::LBrace;
      case '}': return Tok::RBrace;
      case '[': return Tok::LBracket;
      case ']': return Tok::RBracket;
      case ';': return Tok::Semi;
      case ',': return Tok::Comma;
      case '?': return Tok::Question;
      case ':': return Tok::Colon;
      case '@': return Tok::At;
      case '*': return Tok::Star;
      case '/': return Tok::Slash;
      case '%': return Tok::Percent;
      case '-': return Tok::Minus;
      case '+':
        if (peek() == '+') {
          t.text += get();
          return Tok::PlusPlus;
        }
        return Tok::Plus;
      case '=':
        if (peek() == '=') {
          t.text += get();
          return Tok::EqEq;
        }
        return Tok::Assign;
      case '!':
        if (peek() == '=') {
          t.text += get();
          return Tok::Ne;
        }
        return Tok::Not;
      case '<':
        if (peek() == '=') {
          t.text += get();
          return Tok::Le;
        }
        if (peek() == '-') {
          t.text += get();
          return Tok::ArrowLoad;
        }
        if (peek() == '+') {
          t.text += get();
          return Tok::ArrowApp;
        }
        return Tok::Lt;
      case '&':
        if (peek() == '&') {
          t.text += get();
          return Tok::AndAnd;
        }
        break;
      case '|':
        if (peek() == '|') {
          t.text += get();
          return Tok::OrOr;
        }
        break;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.col);
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
public:
  Parser(std::string_view text, bool target) : toks_(Lexer(text).run()), target_(target) {}

  Block parse_program() {
    Block b = parse_block_items();
    expect(Tok::End, "end of input");
    return b;
  }

  ExprPtr parse_single_expr() {
    ExprPtr e = parse_expr();
    expect(Tok::End, "end of input");
    return e;
  }

private:
  const Token& cur() const { return toks_[i_]; }
  const Token& next() const { return toks_[i_ + 1 < toks_.size() ? i_ + 1 : i_]; }
  Token advance() { return toks_[i_++]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool accept(Tok k) {
    if (at(k)) {
      ++i_;
      return true;
    }
    return false;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return advance();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = cur();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", got " + got, t.line, t.col);
  }
  [[noreturn]] void target_only(const char* what) const {
    fail(std::string(what) + " is not allowed in source programs");
  }

  std::string ident() {
    Token t = expect(Tok::Ident, "identifier");
    if (!target_ && is_reserved_name(t.text))
      throw ParseError("'" + t.text + "' is a reserved name in source programs", t.line, t.col);
    return t.text;
  }

  Block parse_block_items() {
    Block out;
    while (!at(Tok::RBrace) && !at(Tok::End)) out.push_back(parse_stmt());
    return out;
  }

  Block parse_braced_block() {
    expect(Tok::LBrace, "'{'");
    Block b = parse_block_items();
    expect(Tok::RBrace, "'}'");
    return b;
  }

  CmdPtr with_pos(CmdPtr c, const Token& t) {
    auto m = std::const_pointer_cast<Cmd>(c);
    m->line = t.line;
    m->col = t.col;
    return m;
  }

  CmdPtr parse_stmt() {
    Token t = cur();
    switch (t.kind) {
      case Tok::KwSkip: {
        advance();
        expect(Tok::Semi, "';'");
        return with_pos(cmd_skip(), t);
      }
      case Tok::KwInitMsf: {
        if (target_) fail("init_msf is not allowed in target programs");
        advance();
        expect(Tok::Semi, "';'");
        return with_pos(cmd_init_msf(), t);
      }
      case Tok::KwUpdateMsf: {
        if (target_) fail("update_msf is not allowed in target programs");
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::Semi, "';'");
        return with_pos(cmd_update_msf(std::move(e)), t);
      }
      case Tok::KwClearMem: {
        if (!target_) target_only("clear_mem");
        advance();
        expect(Tok::Semi, "';'");
        return with_pos(cmd_clear_mem(), t);
      }
      case Tok::KwAssert: {
        if (!target_) target_only("assert");
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::Semi, "';'");
        return with_pos(cmd_assert(std::move(e)), t);
      }
      case Tok::KwLeak: {
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::Semi, "';'");
        return with_pos(cmd_leak(std::move(e)), t);
      }
      case Tok::KwIf: {
        advance();
        ExprPtr cond = parse_expr();
        Block then_b = parse_braced_block();
        Block else_b;
        if (accept(Tok::KwElse)) else_b = parse_braced_block();
        return with_pos(cmd_if(std::move(cond), std::move(then_b), std::move(else_b)), t);
      }
      case Tok::KwWhile: {
        advance();
        ExprPtr cond = parse_expr();
        Block body = parse_braced_block();
        return with_pos(cmd_while(std::move(cond), std::move(body)), t);
      }
      case Tok::LBracket: {
        advance();
        ExprPtr addr = parse_expr();
        expect(Tok::RBracket, "']'");
        if (accept(Tok::ArrowLoad)) {
          std::string v = ident();
          expect(Tok::Semi, "';'");
          return with_pos(cmd_store(std::move(addr), std::move(v)), t);
        }
        if (at(Tok::ArrowApp)) {
          if (!target_) target_only("append store '<+'");
          advance();
          std::string v = ident();
          expect(Tok::Semi, "';'");
          return with_pos(cmd_append_store(std::move(addr), std::move(v)), t);
        }
        fail("expected '<-' or '<+' after store address");
      }
      case Tok::Ident: {
        std::string v = ident();
        if (accept(Tok::Assign)) {
          if (at(Tok::KwProtect)) {
            if (target_) fail("protect is not allowed in target programs");
            advance();
            expect(Tok::LParen, "'('");
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return with_pos(cmd_protect(std::move(v), std::move(e)), t);
          }
          ExprPtr e = parse_expr();
          expect(Tok::Semi, "';'");
          return with_pos(cmd_assign(std::move(v), std::move(e)), t);
        }
        if (accept(Tok::ArrowLoad)) {
          expect(Tok::LBracket, "'['");
          ExprPtr addr = parse_expr();
          expect(Tok::RBracket, "']'");
          if (at(Tok::At)) {
            if (!target_) target_only("indexed load '@'");
            advance();
            ExprPtr idx = parse_expr();
            expect(Tok::Semi, "';'");
            return with_pos(cmd_indexed_load(std::move(v), std::move(addr), std::move(idx)), t);
          }
          expect(Tok::Semi, "';'");
          return with_pos(cmd_load(std::move(v), std::move(addr)), t);
        }
        fail("expected '=' or '<-' after identifier");
      }
      default: fail("expected a statement");
    }
  }

  // Expressions, lowest precedence first: ?: < || < && < comparisons <
  // additive < multiplicative < unary < postfix (++ [..]) < primary.
  ExprPtr parse_expr() { return parse_select(); }

  ExprPtr parse_select() {
    ExprPtr cond = parse_or();
    if (at(Tok::Question)) {
      if (!target_) target_only("select '?:'");
      advance();
      ExprPtr then_e = parse_select();
      expect(Tok::Colon, "':'");
      ExprPtr else_e = parse_select();
      return make_select(std::move(cond), std::move(then_e), std::move(else_e));
    }
    return cond;
  }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (accept(Tok::OrOr)) e = make_bin(BinOp::Or, std::move(e), parse_and());
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (accept(Tok::AndAnd)) e = make_bin(BinOp::And, std::move(e), parse_cmp());
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    if (at(Tok::Lt) || at(Tok::Le) || at(Tok::EqEq) || at(Tok::Ne)) {
      Tok k = advance().kind;
      BinOp op = k == Tok::Lt   ? BinOp::Lt
                 : k == Tok::Le ? BinOp::Le
                 : k == Tok::EqEq ? BinOp::Eq
                                  : BinOp::Ne;
      e = make_bin(op, std::move(e), parse_add());
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    for (;;) {
      if (accept(Tok::Plus))
        e = make_bin(BinOp::Add, std::move(e), parse_mul());
      else if (accept(Tok::Minus))
        e = make_bin(BinOp::Sub, std::move(e), parse_mul());
      else
        return e;
    }
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (accept(Tok::Star))
        e = make_bin(BinOp::Mul, std::move(e), parse_unary());
      else if (accept(Tok::Slash))
        e = make_bin(BinOp::Div, std::move(e), parse_unary());
      else if (accept(Tok::Percent))
        e = make_bin(BinOp::Mod, std::move(e), parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    if (accept(Tok::Not)) return make_un(UnOp::Not, parse_unary());
    if (accept(Tok::Minus)) return make_un(UnOp::Neg, parse_unary());
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (at(Tok::PlusPlus)) {
      if (!target_) target_only("list append '++'");
      advance();
      expect(Tok::LBracket, "'['");
      std::vector<ExprPtr> items;
      if (!at(Tok::RBracket)) {
        items.push_back(parse_expr());
        while (accept(Tok::Comma)) items.push_back(parse_expr());
      }
      expect(Tok::RBracket, "']'");
      e = make_append(std::move(e), std::move(items));
    }
    return e;
  }

  ExprPtr parse_primary() {
    Token t = cur();
    switch (t.kind) {
      case Tok::Number: {
        advance();
        return make_int(Int(t.text));
      }
      case Tok::KwTrue: advance(); return make_bool(true);
      case Tok::KwFalse: advance(); return make_bool(false);
      case Tok::Ident: return make_var(ident());
      case Tok::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::KwHd:
      case Tok::KwTl: {
        if (!target_) target_only("hd/tl");
        advance();
        expect(Tok::LParen, "'('");
        Token name = expect(Tok::Ident, "identifier");
        expect(Tok::RParen, "')'");
        return t.kind == Tok::KwHd ? make_head(name.text) : make_tail(name.text);
      }
      case Tok::KwLog2: {
        if (!target_) target_only("log2");
        advance();
        expect(Tok::LParen, "'('");
        ExprPtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return make_un(UnOp::Log2, std::move(e));
      }
      case Tok::LBracket: {
        if (!target_) target_only("list literal");
        advance();
        std::vector<ExprPtr> items;
        if (!at(Tok::RBracket)) {
          items.push_back(parse_expr());
          while (accept(Tok::Comma)) items.push_back(parse_expr());
        }
        expect(Tok::RBracket, "']'");
        return make_list(std::move(items));
      }
      default: fail("expected an expression");
    }
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
  bool target_;
};

}  // namespace

SourceProgram parse_source(std::string_view text) {
  Parser p(text, /*target=*/false);
  return SourceProgram{p.parse_program()};
}

TargetProgram parse_target(std::string_view text) {
  Parser p(text, /*target=*/true);
  return TargetProgram{p.parse_program()};
}

ExprPtr parse_expr_text(std::string_view text, bool target_dialect) {
  Parser p(text, target_dialect);
  return p.parse_single_expr();
}

}  // namespace sps
