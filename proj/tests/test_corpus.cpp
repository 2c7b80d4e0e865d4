// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include <doctest.h>

#include <filesystem>
#include <set>

#include "sps/corpus.hpp"

using namespace sps;

TEST_CASE("the bundled corpus loads completely") {
  const auto cases = load_corpus(CORPUS_DIR);
  CHECK(cases.size() >= 13);
  std::set<std::string> names;
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(names.insert(c.name).second);  // unique
    CHECK_FALSE(c.description.empty());
    CHECK_FALSE(c.program.cmds.empty());
    CHECK((c.expected == "Violation" || c.expected == "NoViolation"));
  }
  for (const char* required :
       {"initialization", "initialization_selslh", "kocher_case01", "kocher_case05",
        "v4_stl", "v4_stl_fenced", "mac_rotation", "mac_rotation_baseline",
        "selslh_typing_v1"}) {
    CHECK(names.count(required) == 1);
  }
}

TEST_CASE("manifests drive the checker configuration") {
  const CorpusCase c = load_case(std::string(CORPUS_DIR) + "/mac_rotation");
  CHECK(c.cfg.model.kind == LeakKind::CacheLine);
  CHECK(c.cfg.model.line_size == 64);
  CHECK(c.cfg.domain_hi == 7);
  CHECK(c.cfg.max_directives == 8);
  CHECK(c.strategy == DirStrategy::Enumerate);

  const CorpusCase v4 = load_case(std::string(CORPUS_DIR) + "/v4_stl");
  CHECK(v4.cfg.variant == SpectreVariant::V4);

  const CorpusCase sampled = load_case(std::string(CORPUS_DIR) + "/kocher_case05_selslh");
  CHECK(sampled.strategy == DirStrategy::Random);
  CHECK(sampled.cfg.trials == 2000);
}

TEST_CASE("expectation matching accepts both flavors of no-violation") {
  CHECK(expected_matches("Violation", VerdictResult::Violation));
  CHECK_FALSE(expected_matches("Violation", VerdictResult::NoViolationBounded));
  CHECK(expected_matches("NoViolation", VerdictResult::NoViolationExhaustive));
  CHECK(expected_matches("NoViolation", VerdictResult::NoViolationBounded));
  CHECK_FALSE(expected_matches("NoViolation", VerdictResult::Violation));
  CHECK_FALSE(expected_matches("NoViolation", VerdictResult::Inconclusive));
  CHECK_FALSE(expected_matches("Violation", VerdictResult::Inconclusive));
}

TEST_CASE("loading a directory without a manifest fails cleanly") {
  CHECK_THROWS_AS(load_case("/nonexistent/path"), CorpusError);
  const auto tmp = std::filesystem::temp_directory_path() / "spskit_empty_corpus";
  std::filesystem::create_directories(tmp);
  CHECK(load_corpus(tmp.string()).empty());
  std::filesystem::remove_all(tmp);
}

TEST_CASE("two fast cases run end to end with their expected verdicts") {
  const CorpusCase vuln = load_case(std::string(CORPUS_DIR) + "/initialization");
  const Verdict v = run_case(vuln);
  CHECK(expected_matches(vuln.expected, v.result));
  CHECK(v.result == VerdictResult::Violation);

  const CorpusCase hard = load_case(std::string(CORPUS_DIR) + "/kocher_case01_masked");
  const Verdict h = run_case(hard);
  CHECK(expected_matches(hard.expected, h.result));
  CHECK(h.result == VerdictResult::NoViolationExhaustive);
}

TEST_CASE("benchmarking the corpus reports one row per case") {
  const auto rows = bench_corpus(load_corpus(CORPUS_DIR));
  CHECK(rows.size() >= 13);
  for (const auto& row : rows) {
    CAPTURE(row.name);
    CHECK(row.ok);
    CHECK(row.trials > 0);
  }
}
