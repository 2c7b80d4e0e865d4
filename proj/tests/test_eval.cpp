// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include "sps/eval.hpp"
#include "sps/parser.hpp"

using namespace sps;

namespace {

Value ev(const std::string& text, const Env& rho = {}) {
  return eval(parse_expr_text(text, /*target_dialect=*/true), rho);
}

}  // namespace

TEST_CASE("division and modulo round toward negative infinity") {
  CHECK(ev("7 / 2") == Value(Int(3)));
  CHECK(ev("-7 / 2") == Value(Int(-4)));
  CHECK(ev("7 / -2") == Value(Int(-4)));
  CHECK(ev("-7 / -2") == Value(Int(3)));
  CHECK(ev("7 % 2") == Value(Int(1)));
  CHECK(ev("-7 % 2") == Value(Int(1)));   // result sign follows the divisor
  CHECK(ev("7 % -2") == Value(Int(-1)));
  CHECK(ev("-7 % -2") == Value(Int(-1)));
  CHECK(ev("0 - 1 % 8") == Value(Int(-1)));  // precedence: -(1 % 8)
  // (a / b) * b + a % b == a
  for (int a : {-9, -1, 0, 5, 13}) {
    for (int b : {-4, -1, 2, 7}) {
      Env rho{{"a", Value(Int(a))}, {"b", Value(Int(b))}};
      CHECK(ev("(a / b) * b + a % b", rho) == Value(Int(a)));
    }
  }
}

TEST_CASE("division and modulo by zero raise a tagged error") {
  try {
    ev("1 / 0");
    FAIL("expected an evaluation error");
  } catch (const EvalError& e) {
    CHECK(e.code == EvalError::Code::DivByZero);
  }
  CHECK_THROWS_AS(ev("1 % 0"), EvalError);
}

TEST_CASE("log2 is the floor of the base-two logarithm, clamped at zero") {
  CHECK(ev("log2(0)") == Value(Int(0)));
  CHECK(ev("log2(1)") == Value(Int(0)));
  CHECK(ev("log2(2)") == Value(Int(1)));
  CHECK(ev("log2(7)") == Value(Int(2)));
  CHECK(ev("log2(8)") == Value(Int(3)));
  CHECK(ev("log2(0 - 5)") == Value(Int(0)));
  CHECK(ev("log2(1024)") == Value(Int(10)));
}

TEST_CASE("integers are unbounded") {
  const Value v = ev("1000000000000000000000 * 1000000000000000000000");
  REQUIRE(v.is_int());
  CHECK(v.as_int() == Int("1000000000000000000000000000000000000000000"));
}

TEST_CASE("unbound variables read as integer zero") {
  CHECK(ev("nosuch + 1") == Value(Int(1)));
  CHECK(env_get(Env{}, "nosuch") == Value(Int(0)));
}

TEST_CASE("select evaluates only the chosen arm") {
  CHECK(ev("true ? 1 : 1 / 0") == Value(Int(1)));
  CHECK(ev("false ? 1 / 0 : 2") == Value(Int(2)));
  CHECK_THROWS_AS(ev("false ? 1 : 1 / 0"), EvalError);
}

TEST_CASE("logical operators short-circuit") {
  CHECK(ev("false && 1 / 0 == 1") == Value(false));
  CHECK(ev("true || 1 / 0 == 1") == Value(true));
  CHECK_THROWS_AS(ev("true && 1 / 0 == 1"), EvalError);
}

TEST_CASE("list construction, head, tail, and append") {
  Env rho{{"xs", Value(Value::List{Value(Int(1)), Value(true), Value(Int(3))})}};
  CHECK(ev("hd(xs)", rho) == Value(Int(1)));
  CHECK(ev("tl(xs)", rho) == Value(Value::List{Value(true), Value(Int(3))}));
  CHECK(ev("[1, true, 3]", rho) == rho.at("xs"));
  CHECK(ev("xs ++ [4]", rho) ==
        Value(Value::List{Value(Int(1)), Value(true), Value(Int(3)), Value(Int(4))}));
  CHECK(ev("[] ++ [1] ++ [2, 3]") ==
        Value(Value::List{Value(Int(1)), Value(Int(2)), Value(Int(3))}));
}

TEST_CASE("head and tail of an empty list raise a tagged error") {
  Env rho{{"xs", Value(Value::List{})}};
  try {
    ev("hd(xs)", rho);
    FAIL("expected an evaluation error");
  } catch (const EvalError& e) {
    CHECK(e.code == EvalError::Code::EmptyList);
  }
  CHECK_THROWS_AS(ev("tl(xs)", rho), EvalError);
}

TEST_CASE("type confusion raises a tagged error") {
  try {
    ev("1 + true");
    FAIL("expected an evaluation error");
  } catch (const EvalError& e) {
    CHECK(e.code == EvalError::Code::TypeError);
  }
  CHECK_THROWS_AS(ev("!3"), EvalError);
  CHECK_THROWS_AS(ev("1 ? 2 : 3"), EvalError);
  CHECK_THROWS_AS(ev("1 == true"), EvalError);
  CHECK_THROWS_AS(ev("hd(n)", Env{{"n", Value(Int(4))}}), EvalError);
}

TEST_CASE("equality covers all three value shapes") {
  CHECK(ev("1 == 1") == Value(true));
  CHECK(ev("1 != 2") == Value(true));
  CHECK(ev("true == true") == Value(true));
  Env rho{{"xs", Value(Value::List{Value(Int(1))})},
          {"ys", Value(Value::List{Value(Int(1))})},
          {"zs", Value(Value::List{Value(Int(2))})}};
  CHECK(ev("xs == ys", rho) == Value(true));
  CHECK(ev("xs != zs", rho) == Value(true));
}
