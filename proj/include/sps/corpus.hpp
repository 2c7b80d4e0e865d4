// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Bundled benchmark corpus: each case directory holds a program
// (program.sps), a low-equivalence policy (phi.json) and a manifest
// (manifest.json) pinning the check, the checker configuration, and the
// expected verdict. The bench harness replays every case and compares the
// verdict against the manifest.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sps/checker.hpp"
#include "sps/inputs.hpp"

namespace sps {

struct CorpusError : std::runtime_error {
  explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

struct CorpusCase {
  std::string name;
  std::filesystem::path dir;
  std::string description;
  std::string variant;   // vulnerable | index_masked | selslh | fenced
  std::string spectre;   // v1 | v4
  std::string model;     // baseline | cacheline | vartime
  std::string expected;  // Violation | NoViolation
  std::string check = "sct";  // sct | ct | product | taint
  DirStrategy strategy = DirStrategy::Enumerate;
  SourceProgram program;
  PhiSpec phi;
  GenConfig cfg;  // defaults overridden by the manifest's "config" object
};

// Loads one case directory; throws CorpusError on a malformed case.
CorpusCase load_case(const std::filesystem::path& dir);

// Loads every subdirectory of `dir` that contains a manifest.json, sorted by
// name. Throws CorpusError if the directory is missing or any case is bad.
std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir);

// Runs the case's configured check ("ct"/"product"/"taint" first translate
// the program into speculation-passing style for the case's variant).
Verdict run_case(const CorpusCase& c);

// True when the verdict's result is acceptable for the manifest's expected
// string ("NoViolation" accepts both the exhaustive and bounded forms).
bool expected_matches(const std::string& expected, VerdictResult actual);

struct BenchRow {
  std::string name;
  std::string check;
  std::string strategy;
  std::string expected;
  VerdictResult actual = VerdictResult::Inconclusive;
  bool ok = false;
  std::int64_t trials = 0;
  double millis = 0.0;
};

std::vector<BenchRow> bench_corpus(const std::vector<CorpusCase>& cases);

}  // namespace sps
