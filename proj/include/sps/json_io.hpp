// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// JSON encodings for inputs, policies, traces, run results, verdicts and
// witnesses. Integers that fit in 64 bits are emitted as JSON numbers,
// anything larger as a decimal string; both forms are accepted on input.
// Memory maps accept "lo..hi" range keys (the value fills [lo, hi)).
// Object key order is fixed so output is byte-stable.
#pragma once

#include <string>

#include <json.hpp>

#include "sps/ast.hpp"
#include "sps/checker.hpp"
#include "sps/inputs.hpp"
#include "sps/semantics.hpp"

namespace sps {

using ordered_json = nlohmann::ordered_json;

struct JsonError : std::runtime_error {
  explicit JsonError(const std::string& what) : std::runtime_error(what) {}
};

ordered_json int_to_json(const Int& v);
Int int_from_json(const ordered_json& j);

ordered_json value_to_json(const Value& v);
Value value_from_json(const ordered_json& j);

// {"k":"branch","b":true} | {"k":"addr","i":5} | {"k":"op","v":[3,1]}
ordered_json obs_to_json(const Obs& o);
Obs obs_from_json(const ordered_json& j);
ordered_json trace_to_json(const Trace& t);
Trace trace_from_json(const ordered_json& j);

// {"status":..,"steps":..,"consumed":..,"trace":[..]}
ordered_json run_result_to_json(const RunResult& r);

// {"vars":{"x":1},"mem":{"0":5,"4..8":0}}
ordered_json input_to_json(const Input& in);
Input input_from_json(const ordered_json& j);

// {"public_vars":[..],"public_mem":["0..2"],"constraints":["x < 2"],
//  "universe_vars":[..]?}  — universe_vars are returned separately because
// they configure generation, not relatedness.
PhiSpec phi_from_json(const ordered_json& j, std::vector<std::string>* universe_vars = nullptr);
ordered_json phi_to_json(const PhiSpec& phi);

ordered_json witness_to_json(const Witness& w);
Witness witness_from_json(const ordered_json& j);

ordered_json verdict_to_json(const Verdict& v);

}  // namespace sps
