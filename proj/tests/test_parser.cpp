// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sps/parser.hpp"
#include "sps/pretty.hpp"

using namespace sps;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pretty-printing a parsed source program is a fixed point") {
  const char* text =
      "x = 1 + 2 * 3;\n"
      "init_msf;\n"
      "if x < 4 {\n"
      "  v <- [x];\n"
      "  update_msf x < 4;\n"
      "  v = protect(v);\n"
      "} else {\n"
      "  [x] <- v;\n"
      "}\n"
      "while x < 10 {\n"
      "  x = x + 1;\n"
      "}\n"
      "leak x;\n";
  const SourceProgram p = parse_source(text);
  const std::string printed = pretty(p);
  const SourceProgram p2 = parse_source(printed);
  CHECK(pretty(p2) == printed);
}

TEST_CASE("pretty-printing a parsed target program is a fixed point") {
  const char* text =
      "skip;\n"
      "assert x < 2;\n"
      "v <- [x] @ 1;\n"
      "[x] <+ v;\n"
      "clear_mem;\n"
      "obs = [] ++ [1] ++ [true, 2];\n"
      "y = hd(obs);\n"
      "z = tl(obs);\n"
      "w = x < 2 ? -y : log2(y);\n";
  const TargetProgram p = parse_target(text);
  const std::string printed = pretty(p);
  const TargetProgram p2 = parse_target(printed);
  CHECK(pretty(p2) == printed);
}

TEST_CASE("every corpus program parses and pretty-prints to a fixed point") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(CORPUS_DIR)) {
    if (!entry.is_directory()) continue;
    const auto file = entry.path() / "program.sps";
    if (!std::filesystem::exists(file)) continue;
    ++seen;
    CAPTURE(file.string());
    const SourceProgram p = parse_source(slurp(file));
    const std::string printed = pretty(p);
    CHECK(pretty(parse_source(printed)) == printed);
  }
  CHECK(seen >= 13);
}

TEST_CASE("operator precedence binds as documented") {
  CHECK(pretty_expr(parse_expr_text("1 + 2 * 3")) == "1 + 2 * 3");
  CHECK(pretty_expr(parse_expr_text("(1 + 2) * 3")) == "(1 + 2) * 3");
  CHECK(pretty_expr(parse_expr_text("a < b && c < d || e == f")) ==
        "a < b && c < d || e == f");
  CHECK(pretty_expr(parse_expr_text("!(a && b)")) == "!(a && b)");
  CHECK(pretty_expr(parse_expr_text("a ? b : c ? d : e", true)) == "a ? b : c ? d : e");
  CHECK(pretty_expr(parse_expr_text("1 - 2 - 3")) == "1 - 2 - 3");  // left assoc
  CHECK(pretty_expr(parse_expr_text("1 - (2 - 3)")) == "1 - (2 - 3)");
}

TEST_CASE("comments and whitespace are insignificant") {
  const SourceProgram a = parse_source("x = 1; // trailing comment\n// full line\n y=1 ;");
  CHECK(a.cmds.size() == 2);
  CHECK(pretty(a) == "x = 1;\ny = 1;\n");
}

TEST_CASE("source dialect rejects target-only constructs") {
  CHECK_THROWS_AS(parse_source("assert x < 1;"), ParseError);
  CHECK_THROWS_AS(parse_source("clear_mem;"), ParseError);
  CHECK_THROWS_AS(parse_source("v <- [0] @ 1;"), ParseError);
  CHECK_THROWS_AS(parse_source("[0] <+ v;"), ParseError);
  CHECK_THROWS_AS(parse_source("x = a ? 1 : 2;"), ParseError);
  CHECK_THROWS_AS(parse_source("x = log2(y);"), ParseError);
  CHECK_THROWS_AS(parse_source("x = hd(y);"), ParseError);
  CHECK_THROWS_AS(parse_source("x = [];"), ParseError);
  CHECK_THROWS_AS(parse_source("x = y ++ [1];"), ParseError);
}

TEST_CASE("source dialect rejects reserved variable names") {
  CHECK_THROWS_AS(parse_source("dir = 1;"), ParseError);
  CHECK_THROWS_AS(parse_source("ms = 1;"), ParseError);
  CHECK_THROWS_AS(parse_source("obs = 1;"), ParseError);
  CHECK_THROWS_AS(parse_source("ret = 1;"), ParseError);
  // The target dialect owns those names.
  CHECK_NOTHROW(parse_target("dir = tl(dir); ms = true; obs = [];"));
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_source("x = 1;\ny = ;\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col > 0);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("leak is sugar for an empty-bodied branch") {
  const SourceProgram p = parse_source("leak x + 1 == 2;");
  REQUIRE(p.cmds.size() == 1);
  CHECK(p.cmds[0]->kind == Cmd::Kind::If);
  CHECK(p.cmds[0]->body1.empty());
  CHECK(p.cmds[0]->body2.empty());
  CHECK(pretty(p) == "leak x + 1 == 2;\n");
}

TEST_CASE("empty else blocks are omitted when printing") {
  const SourceProgram p = parse_source("if x < 1 { y = 1; } else { }");
  CHECK(pretty(p) == "if x < 1 {\n  y = 1;\n}\n");
}
