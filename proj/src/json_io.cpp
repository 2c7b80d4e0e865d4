// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/json_io.hpp"

#include <cctype>
#include <cstdint>
#include <limits>

#include "sps/parser.hpp"
#include "sps/pretty.hpp"

namespace sps {

namespace {

[[noreturn]] void fail(const std::string& what) { throw JsonError(what); }

void expect_object(const ordered_json& j, const char* what) {
  if (!j.is_object()) fail(std::string(what) + ": expected a JSON object");
}

// Parses "n" or "lo..hi" map keys; hi is exclusive.
std::pair<Int, Int> parse_mem_key(const std::string& key) {
  const auto dots = key.find("..");
  try {
    if (dots == std::string::npos) {
      Int lo(key);
      return {lo, lo + 1};
    }
    Int lo(key.substr(0, dots));
    Int hi(key.substr(dots + 2));
    if (hi < lo) fail("memory range '" + key + "' is reversed");
    return {lo, hi};
  } catch (const JsonError&) {
    throw;
  } catch (const std::exception&) {
    fail("bad memory key '" + key + "' (want \"n\" or \"lo..hi\")");
  }
}

}  // namespace

ordered_json int_to_json(const Int& v) {
  static const Int kMin(std::numeric_limits<std::int64_t>::min());
  static const Int kMax(std::numeric_limits<std::int64_t>::max());
  if (v >= kMin && v <= kMax) return static_cast<std::int64_t>(v);
  return v.str();
}

Int int_from_json(const ordered_json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return Int(j.get<std::uint64_t>());
  if (j.is_string()) {
    try {
      return Int(j.get<std::string>());
    } catch (const std::exception&) {
      fail("bad integer literal: " + j.dump());
    }
  }
  fail("expected an integer (number or decimal string), got " + j.dump());
}

ordered_json value_to_json(const Value& v) {
  if (v.is_bool()) return v.as_bool();
  if (v.is_int()) return int_to_json(v.as_int());
  ordered_json arr = ordered_json::array();
  for (const auto& e : v.as_list()) arr.push_back(value_to_json(e));
  return arr;
}

Value value_from_json(const ordered_json& j) {
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_array()) {
    std::vector<Value> elems;
    elems.reserve(j.size());
    for (const auto& e : j) elems.push_back(value_from_json(e));
    return Value(std::move(elems));
  }
  return Value(int_from_json(j));
}

ordered_json obs_to_json(const Obs& o) {
  ordered_json j;
  switch (o.kind) {
    case Obs::Kind::Branch:
      j["k"] = "branch";
      j["b"] = o.branch;
      break;
    case Obs::Kind::Addr:
      j["k"] = "addr";
      j["i"] = int_to_json(o.addr);
      break;
    case Obs::Kind::Op:
      j["k"] = "op";
      j["v"] = ordered_json::array();
      for (const auto& v : o.op_sizes) j["v"].push_back(int_to_json(v));
      break;
  }
  return j;
}

Obs obs_from_json(const ordered_json& j) {
  expect_object(j, "observation");
  const std::string k = j.at("k").get<std::string>();
  if (k == "branch") return Obs::mk_branch(j.at("b").get<bool>());
  if (k == "addr") return Obs::mk_addr(int_from_json(j.at("i")));
  if (k == "op") {
    std::vector<Int> sizes;
    for (const auto& v : j.at("v")) sizes.push_back(int_from_json(v));
    return Obs::mk_op(std::move(sizes));
  }
  fail("unknown observation kind '" + k + "'");
}

ordered_json trace_to_json(const Trace& t) {
  ordered_json arr = ordered_json::array();
  for (const auto& o : t) arr.push_back(obs_to_json(o));
  return arr;
}

Trace trace_from_json(const ordered_json& j) {
  if (!j.is_array()) fail("trace: expected a JSON array");
  Trace t;
  t.reserve(j.size());
  for (const auto& o : j) t.push_back(obs_from_json(o));
  return t;
}

ordered_json run_result_to_json(const RunResult& r) {
  ordered_json j;
  j["status"] = run_status_name(r.status);
  j["steps"] = r.steps;
  j["consumed"] = r.directives_consumed;
  j["trace"] = trace_to_json(r.trace);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

ordered_json input_to_json(const Input& in) {
  ordered_json vars = ordered_json::object();
  for (const auto& [name, v] : in.vars) vars[name] = value_to_json(v);
  ordered_json mem = ordered_json::object();
  for (const auto& [addr, v] : in.mem) mem[addr.str()] = value_to_json(v);
  ordered_json j;
  j["vars"] = vars;
  j["mem"] = mem;
  return j;
}

Input input_from_json(const ordered_json& j) {
  expect_object(j, "input");
  Input in;
  if (j.contains("vars")) {
    expect_object(j.at("vars"), "input.vars");
    for (const auto& [name, v] : j.at("vars").items()) in.vars[name] = value_from_json(v);
  }
  if (j.contains("mem")) {
    expect_object(j.at("mem"), "input.mem");
    for (const auto& [key, v] : j.at("mem").items()) {
      const auto [lo, hi] = parse_mem_key(key);
      const Value fill = value_from_json(v);
      for (Int a = lo; a < hi; ++a) in.mem[a] = fill;
    }
  }
  return in;
}

PhiSpec phi_from_json(const ordered_json& j, std::vector<std::string>* universe_vars) {
  expect_object(j, "policy");
  PhiSpec phi;
  if (j.contains("public_vars")) {
    for (const auto& v : j.at("public_vars")) phi.public_vars.push_back(v.get<std::string>());
  }
  if (j.contains("public_mem")) {
    for (const auto& entry : j.at("public_mem")) {
      if (entry.is_string()) {
        const auto [lo, hi] = parse_mem_key(entry.get<std::string>());
        phi.public_mem.push_back({lo, hi});
      } else {
        const Int a = int_from_json(entry);
        phi.public_mem.push_back({a, a + 1});
      }
    }
  }
  if (j.contains("constraints")) {
    for (const auto& c : j.at("constraints")) {
      const std::string text = c.get<std::string>();
      try {
        phi.constraints.push_back(parse_expr_text(text));
        phi.constraint_texts.push_back(text);
      } catch (const ParseError& e) {
        fail("bad constraint '" + text + "': " + e.what());
      }
    }
  }
  if (universe_vars != nullptr && j.contains("universe_vars")) {
    for (const auto& v : j.at("universe_vars")) universe_vars->push_back(v.get<std::string>());
  }
  return phi;
}

ordered_json phi_to_json(const PhiSpec& phi) {
  ordered_json j;
  j["public_vars"] = ordered_json::array();
  for (const auto& v : phi.public_vars) j["public_vars"].push_back(v);
  j["public_mem"] = ordered_json::array();
  for (const auto& r : phi.public_mem) j["public_mem"].push_back(r.lo.str() + ".." + r.hi.str());
  j["constraints"] = ordered_json::array();
  for (std::size_t i = 0; i < phi.constraints.size(); ++i) {
    j["constraints"].push_back(i < phi.constraint_texts.size() ? phi.constraint_texts[i]
                                                               : pretty_expr(phi.constraints[i]));
  }
  return j;
}

ordered_json witness_to_json(const Witness& w) {
  ordered_json j;
  j["input1"] = input_to_json(w.i1);
  j["input2"] = input_to_json(w.i2);
  j["dirs"] = dirs_to_string(w.dirs);
  j["divergence"] = w.divergence;
  j["partial"] = w.partial;
  return j;
}

Witness witness_from_json(const ordered_json& j) {
  expect_object(j, "witness");
  Witness w;
  w.i1 = input_from_json(j.at("input1"));
  w.i2 = j.contains("input2") ? input_from_json(j.at("input2")) : w.i1;
  if (j.contains("dirs")) w.dirs = dirs_from_string(j.at("dirs").get<std::string>());
  if (j.contains("divergence")) w.divergence = j.at("divergence").get<std::int64_t>();
  if (j.contains("partial")) w.partial = j.at("partial").get<bool>();
  return w;
}

ordered_json verdict_to_json(const Verdict& v) {
  ordered_json j;
  j["result"] = verdict_result_name(v.result);
  j["trials"] = v.trials;
  j["conclusive"] = v.conclusive;
  j["vacuous"] = v.vacuous;
  j["seed"] = v.seed;
  if (v.witness.has_value()) j["witness"] = witness_to_json(*v.witness);
  return j;
}

}  // namespace sps
