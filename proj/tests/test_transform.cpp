// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <stdexcept>

#include "sps/parser.hpp"
#include "sps/pretty.hpp"
#include "sps/semantics.hpp"
#include "sps/transform.hpp"

using namespace sps;

TEST_CASE("speculation-passing translation of a loop") {
  const SourceProgram p = parse_source(
      "[0] <- sec;\n"
      "i = 0;\n"
      "while i < n {\n"
      "  [i] <- pub;\n"
      "  i = i + 1;\n"
      "}\n"
      "v <- [0];\n"
      "t <- [8 + v];\n");
  CHECK(pretty(sps::sps(p)) ==
        "ms = false;\n"
        "[0] <- sec;\n"
        "i = 0;\n"
        "leak i < n;\n"
        "while hd(dir) {\n"
        "  dir = tl(dir);\n"
        "  ms = ms || !(i < n);\n"
        "  [i] <- pub;\n"
        "  i = i + 1;\n"
        "  leak i < n;\n"
        "}\n"
        "ms = ms || i < n;\n"
        "dir = tl(dir);\n"
        "v <- [0];\n"
        "t <- [8 + v];\n");
}

TEST_CASE("speculation-passing translation of a hardened branch") {
  const SourceProgram p = parse_source(
      "init_msf;\n"
      "if x < 1 {\n"
      "  update_msf x < 1;\n"
      "  v = protect(y);\n"
      "} else { skip; }\n");
  CHECK(pretty(sps::sps(p)) ==
        "ms = false;\n"
        "assert !ms;\n"
        "msf = false;\n"
        "leak x < 1;\n"
        "if hd(dir) {\n"
        "  dir = tl(dir);\n"
        "  ms = ms || !(x < 1);\n"
        "  msf = x < 1 ? msf : true;\n"
        "  v = msf ? 0 : y;\n"
        "} else {\n"
        "  dir = tl(dir);\n"
        "  ms = ms || x < 1;\n"
        "  skip;\n"
        "}\n");
}

TEST_CASE("store-bypass translation buffers stores and indexes loads") {
  const SourceProgram p = parse_source("[0] <- s;\nv <- [0];\ninit_msf;\n");
  CHECK(pretty(sps_v4(p)) ==
        "ms = false;\n"
        "[0] <+ s;\n"
        "v <- [0] @ hd(dir);\n"
        "ms = ms || hd(dir) != 0;\n"
        "dir = tl(dir);\n"
        "assert !ms;\n"
        "msf = false;\n"
        "clear_mem;\n");
}

TEST_CASE("the translations reject reserved names and target-only commands") {
  SourceProgram bad_name;
  bad_name.cmds.push_back(cmd_assign("ms", make_int(1)));
  CHECK_THROWS_AS(sps::sps(bad_name), TransformError);

  SourceProgram bad_cmd;
  bad_cmd.cmds.push_back(cmd_assert(make_bool(true)));
  CHECK_THROWS_AS(sps::sps(bad_cmd), TransformError);
  CHECK_THROWS_AS(sps_v4(bad_cmd), TransformError);
}

TEST_CASE("the trace transformer echoes each branch's directive") {
  const Trace t = {Obs::mk_branch(true), Obs::mk_addr(5), Obs::mk_branch(false)};
  const Directives dirs =
      {Directive::force_of(false), Directive::load_of(2), Directive::force_of(true)};
  const Trace expect = {Obs::mk_branch(true), Obs::mk_branch(false), Obs::mk_addr(5),
                        Obs::mk_branch(false), Obs::mk_branch(true)};
  CHECK(t_obs(t, dirs) == expect);
  CHECK(t_obs_inv(expect) == t);
  CHECK(t_obs(Trace{}, {}) == Trace{});
  CHECK_THROWS_AS(t_obs(t, {Directive::force_of(false)}), std::invalid_argument);
}

TEST_CASE("assert elimination golden: straight line") {
  const TargetProgram p = parse_target("assert a < 1;\nx = 1;\n");
  CHECK(pretty(assert_elim(p)) ==
        "ret = false;\n"
        "ret = ret || !(a < 1);\n"
        "if !ret {\n"
        "  x = 1;\n"
        "}\n");
}

TEST_CASE("assert elimination golden: loop with an assert strengthens the head") {
  const TargetProgram p = parse_target("while i < n {\n  assert i < 2;\n  i = i + 1;\n}\n");
  CHECK(pretty(assert_elim(p)) ==
        "ret = false;\n"
        "while !ret && i < n {\n"
        "  ret = ret || !(i < 2);\n"
        "  if !ret {\n"
        "    i = i + 1;\n"
        "  }\n"
        "}\n");
}

TEST_CASE("assert elimination leaves assert-free loops untouched") {
  const TargetProgram p = parse_target("while i < n {\n  i = i + 1;\n}\n");
  CHECK(pretty(assert_elim(p)) ==
        "ret = false;\n"
        "while i < n {\n"
        "  i = i + 1;\n"
        "}\n");
}

TEST_CASE("assert elimination rejects programs that already use ret") {
  CHECK_THROWS_AS(assert_elim(parse_target("ret = true;")), TransformError);
}

TEST_CASE("assert elimination turns the failure into silence, preserving the trace") {
  const TargetProgram p = parse_target("v <- [1];\nassert v == 9;\n[2] <- v;\n");
  Input in;
  in.mem[Int(1)] = Value(Int(4));

  const RunResult orig = run_seq(p, in, {});
  CHECK(orig.status == RunStatus::AssertError);
  CHECK(orig.trace == Trace{Obs::mk_addr(1)});

  const RunResult elim = run_seq(assert_elim(p), in, {});
  CHECK(elim.status == RunStatus::Completed);
  CHECK(elim.trace == orig.trace);
  CHECK(env_get(elim.rho, "ret") == Value(true));
  CHECK(elim.mem.head(Int(2)) == Value(Int(0)));  // the store stayed dead
}

TEST_CASE("leak instrumentation golden") {
  const TargetProgram p = parse_target("v <- [x];\nif v < 2 { skip; } else { skip; }\n");
  CHECK(pretty(leak_instrument(p)) ==
        "obs = [];\n"
        "obs = obs ++ [1, x];\n"
        "v <- [x];\n"
        "obs = obs ++ [0, v < 2 ? 1 : 0];\n"
        "if v < 2 {\n"
        "  skip;\n"
        "} else {\n"
        "  skip;\n"
        "}\n");
}

TEST_CASE("leak instrumentation under the cache-line model records line numbers") {
  const TargetProgram p = parse_target("v <- [x];\n");
  CHECK(pretty(leak_instrument(p, LeakageModel::cacheline(4))) ==
        "obs = [];\n"
        "obs = obs ++ [1, x / 4];\n"
        "v <- [x];\n");
}

TEST_CASE("leak instrumentation requires assert elimination first") {
  const TargetProgram p = parse_target("assert x < 1;");
  try {
    leak_instrument(p);
    FAIL("expected a transform error");
  } catch (const TransformError& e) {
    CHECK(std::string(e.what()).find("apply assert-elim first") != std::string::npos);
  }
  CHECK_THROWS_AS(leak_instrument(parse_target("obs = 1;")), TransformError);
}

TEST_CASE("an instrumented run reproduces its own trace in obs") {
  const TargetProgram p = parse_target(
      "v <- [x];\n"
      "while v < 2 {\n"
      "  v = v + 1;\n"
      "  [v] <- x;\n"
      "}\n"
      "q = v / 2;\n");
  Input in;
  in.vars["x"] = Value(Int(1));
  for (const LeakageModel& model :
       {LeakageModel::baseline(), LeakageModel::cacheline(4), LeakageModel::vartime()}) {
    CAPTURE(model.line_size);
    const RunResult plain = run_seq(p, in, {}, model);
    REQUIRE(plain.status == RunStatus::Completed);
    const RunResult inst = run_seq(leak_instrument(p, model), in, {}, model);
    REQUIRE(inst.status == RunStatus::Completed);
    CHECK(decode_obs(env_get(inst.rho, "obs")) == plain.trace);
  }
}

TEST_CASE("decode_obs rejects malformed observation lists") {
  CHECK_THROWS_AS(decode_obs(Value(Int(3))), std::invalid_argument);
  CHECK_THROWS_AS(decode_obs(Value(Value::List{Value(Int(9))})), std::invalid_argument);
  CHECK_THROWS_AS(decode_obs(Value(Value::List{Value(Int(0))})), std::invalid_argument);
  CHECK(decode_obs(Value(Value::List{})) == Trace{});
}

TEST_CASE("retagging renames variables but not literals") {
  const TargetProgram p = parse_target("x = y + 1;\nv <- [x];\n[v] <- x;\n");
  CHECK(pretty(rtag(p, "_2")) ==
        "x_2 = y_2 + 1;\n"
        "v_2 <- [x_2];\n"
        "[v_2] <- x_2;\n");
}

TEST_CASE("self-composition golden") {
  const TargetProgram p = parse_target("v <- [x];\nif v < 2 { skip; } else { skip; }\n");
  CHECK(pretty(product(p, LeakageModel::baseline(), Int(100))) ==
        "assert x_1 == x_2;\n"
        "v_1 <- [x_1];\n"
        "v_2 <- [x_2 + 100];\n"
        "assert (v_1 < 2) == (v_2 < 2);\n"
        "if v_1 < 2 {\n"
        "  skip;\n"
        "} else {\n"
        "  skip;\n"
        "}\n");
}

TEST_CASE("the composed program keeps the copies in disjoint memory") {
  const TargetProgram p = parse_target("[x] <- y;\nv <- [x];\n");
  Input in;
  in.vars["x_1"] = Value(Int(0));
  in.vars["x_2"] = Value(Int(0));
  in.vars["y_1"] = Value(Int(5));
  in.vars["y_2"] = Value(Int(7));
  const RunResult r = run_seq(product(p, LeakageModel::baseline(), Int(100)), in, {});
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.mem.head(Int(0)) == Value(Int(5)));
  CHECK(r.mem.head(Int(100)) == Value(Int(7)));
  CHECK(env_get(r.rho, "v_1") == Value(Int(5)));
  CHECK(env_get(r.rho, "v_2") == Value(Int(7)));
}

TEST_CASE("the composed program faults exactly on unequal leaks") {
  const TargetProgram p = parse_target("t <- [s];\n");
  const TargetProgram q = product(p, LeakageModel::baseline(), Int(100));
  Input same;
  same.vars["s_1"] = Value(Int(1));
  same.vars["s_2"] = Value(Int(1));
  CHECK(run_seq(q, same, {}).status == RunStatus::Completed);

  Input diff = same;
  diff.vars["s_2"] = Value(Int(2));
  CHECK(run_seq(q, diff, {}).status == RunStatus::AssertError);

  // Under the cache-line model, addresses within one line are equal leaks.
  const TargetProgram ql = product(p, LeakageModel::cacheline(4), Int(100));
  CHECK(run_seq(ql, diff, {}).status == RunStatus::Completed);
}

TEST_CASE("self-composition requires assert elimination first") {
  try {
    product(parse_target("assert x < 1;"));
    FAIL("expected a transform error");
  } catch (const TransformError& e) {
    CHECK(std::string(e.what()).find("apply assert-elim first") != std::string::npos);
  }
}
