// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "sps/json_io.hpp"
#include "sps/parser.hpp"
#include "sps/transform.hpp"

namespace sps {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json load_json(const std::filesystem::path& path) {
  try {
    return ordered_json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

void apply_config(GenConfig& cfg, const ordered_json& j, const std::filesystem::path& where) {
  if (!j.is_object()) throw CorpusError(where.string() + ": \"config\" must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "domain") {
      if (!v.is_array() || v.size() != 2)
        throw CorpusError(where.string() + ": \"domain\" must be [lo, hi]");
      cfg.domain_lo = int_from_json(v[0]);
      cfg.domain_hi = int_from_json(v[1]);
    } else if (key == "mem_size") {
      cfg.mem_size = int_from_json(v);
    } else if (key == "max_directives") {
      cfg.max_directives = v.get<int>();
    } else if (key == "trials") {
      cfg.trials = v.get<std::int64_t>();
    } else if (key == "fuel") {
      cfg.fuel = v.get<std::int64_t>();
    } else if (key == "seed") {
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "flip_prob") {
      cfg.flip_prob = v.get<double>();
    } else if (key == "flip_k") {
      cfg.flip_k = v.get<int>();
    } else if (key == "line_size") {
      cfg.model.line_size = int_from_json(v);
    } else if (key == "product_offset") {
      cfg.product_offset = int_from_json(v);
    } else if (key == "max_enum_pairs") {
      cfg.max_enum_pairs = v.get<std::int64_t>();
    } else {
      throw CorpusError(where.string() + ": unknown config key \"" + key + "\"");
    }
  }
}

}  // namespace

CorpusCase load_case(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  const auto program_path = dir / "program.sps";
  const auto phi_path = dir / "phi.json";
  const ordered_json manifest = load_json(manifest_path);
  if (!manifest.is_object()) throw CorpusError(manifest_path.string() + ": expected an object");

  CorpusCase c;
  c.dir = dir;
  try {
    c.name = manifest.at("name").get<std::string>();
    c.variant = manifest.at("variant").get<std::string>();
    c.spectre = manifest.at("spectre").get<std::string>();
    c.model = manifest.at("model").get<std::string>();
    c.expected = manifest.at("expected").get<std::string>();
    if (manifest.contains("description")) c.description = manifest.at("description");
    if (manifest.contains("check")) c.check = manifest.at("check").get<std::string>();
    c.strategy = dir_strategy_from_name(
        manifest.contains("strategy") ? manifest.at("strategy").get<std::string>()
                                      : std::string("enumerate"));
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(manifest_path.string() + ": " + e.what());
  }

  static const std::vector<std::string> kVariants = {"vulnerable", "index_masked", "selslh",
                                                     "fenced"};
  if (std::find(kVariants.begin(), kVariants.end(), c.variant) == kVariants.end())
    throw CorpusError(manifest_path.string() + ": unknown variant \"" + c.variant + "\"");
  if (c.expected != "Violation" && c.expected != "NoViolation")
    throw CorpusError(manifest_path.string() + ": expected must be Violation or NoViolation");
  if (c.check != "sct" && c.check != "ct" && c.check != "product" && c.check != "taint")
    throw CorpusError(manifest_path.string() + ": unknown check \"" + c.check + "\"");

  try {
    c.cfg.variant = variant_from_name(c.spectre);
    c.cfg.model = LeakageModel::from_name(c.model);
  } catch (const std::exception& e) {
    throw CorpusError(manifest_path.string() + ": " + e.what());
  }
  if (manifest.contains("config")) apply_config(c.cfg, manifest.at("config"), manifest_path);

  try {
    c.program = parse_source(slurp(program_path));
  } catch (const ParseError& e) {
    throw CorpusError(program_path.string() + ": " + e.what());
  }
  try {
    c.phi = phi_from_json(load_json(phi_path), &c.cfg.universe_vars);
  } catch (const JsonError& e) {
    throw CorpusError(phi_path.string() + ": " + e.what());
  }
  return c;
}

std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw CorpusError("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> subdirs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "manifest.json"))
      subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<CorpusCase> cases;
  cases.reserve(subdirs.size());
  for (const auto& sub : subdirs) cases.push_back(load_case(sub));
  return cases;
}

Verdict run_case(const CorpusCase& c) {
  if (c.check == "sct") return check_sct(c.program, c.phi, c.cfg, c.strategy);
  const TargetProgram translated =
      c.cfg.variant == SpectreVariant::V4 ? sps_v4(c.program) : sps(c.program);
  if (c.check == "ct") return check_ct(translated, c.phi, c.cfg, c.strategy);
  if (c.check == "product") return check_product(translated, c.phi, c.cfg, c.strategy);
  return check_taint(translated, c.phi, c.cfg, c.strategy);
}

bool expected_matches(const std::string& expected, VerdictResult actual) {
  if (expected == "Violation") return actual == VerdictResult::Violation;
  return actual == VerdictResult::NoViolationExhaustive ||
         actual == VerdictResult::NoViolationBounded;
}

std::vector<BenchRow> bench_corpus(const std::vector<CorpusCase>& cases) {
  std::vector<BenchRow> rows;
  rows.reserve(cases.size());
  for (const auto& c : cases) {
    BenchRow row;
    row.name = c.name;
    row.check = c.check;
    row.strategy = dir_strategy_name(c.strategy);
    row.expected = c.expected;
    const auto t0 = std::chrono::steady_clock::now();
    const Verdict v = run_case(c);
    const auto t1 = std::chrono::steady_clock::now();
    row.actual = v.result;
    row.trials = v.trials;
    row.ok = expected_matches(c.expected, v.result);
    row.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sps
