// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// Relational checkers. A trial picks a pair of policy-related inputs (same
// public parts, independently chosen secrets) and a directive sequence, runs
// the program twice, and compares the observation traces:
//
//   * check_sct runs a source program under the speculative semantics —
//     speculative constant-time.
//   * check_ct runs a target program sequentially with the directives bound
//     to `dir` — plain constant-time of the transformed program.
//   * check_product reduces constant-time to assert-safety of the
//     self-composition and runs that single program per trial.
//   * check_taint runs single inputs through the taint tracker.
//
// Trial outcomes: a pair of complete runs (Completed / FenceHalt /
// AssertError) with equal traces passes; runs whose traces already differ
// are a violation regardless of how they ended; a cut-off run (out of
// directives or fuel, or a runtime fault) whose trace so far still agrees is
// vacuous — the definitions quantify over complete runs only, so vacuous
// trials are counted but decide nothing.
//
// Verdicts: `enumerate` walks every policy-related input pair against every
// directive sequence the program can consume (discovered by probing, bounded
// by max_directives) and reports NoViolationExhaustive when nothing
// diverges. Sampling strategies report NoViolationBounded after the
// configured number of trials, or Inconclusive if not a single trial was
// conclusive. Any divergence reports Violation with a replayable witness.
//
// Generated inputs draw variable values and secret memory cells from a small
// integer domain; public memory cells are fixed to zero, so a policy's
// public memory contents are not part of the searched space.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sps/ast.hpp"
#include "sps/inputs.hpp"
#include "sps/semantics.hpp"

namespace sps {

// Deterministic, platform-independent RNG (no std distributions).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  // Uniform-ish integer in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0) < p;
  }

private:
  std::mt19937_64 gen_;
};

enum class DirStrategy {
  Random,      // adaptive: fresh coin per branch request, bounded length
  AllTrue,     // force every prediction taken
  AllFalse,    // force every prediction not taken
  FlipFirstK,  // k mispredict-style ⊥ directives, then ⊤ padding
  Enumerate,   // walk the whole reachable directive tree
};

std::string dir_strategy_name(DirStrategy s);
DirStrategy dir_strategy_from_name(const std::string& s);

struct GenConfig {
  Int domain_lo = 0;  // inclusive value domain for generated integers
  Int domain_hi = 3;
  Int mem_size = 16;       // generated/enumerated memory is [0, mem_size)
  int max_directives = 6;  // directive sequence length bound
  std::int64_t trials = 10000;
  std::int64_t fuel = kDefaultFuel;
  std::uint64_t seed = 42;
  double flip_prob = 0.5;  // DirStrategy::Random: probability of a ⊤ directive
  int flip_k = 1;          // DirStrategy::FlipFirstK
  LeakageModel model = LeakageModel::baseline();
  SpectreVariant variant = SpectreVariant::V1;
  Int product_offset = Int(1) << 20;
  // Extra input variables beyond the program's free variables (a policy can
  // declare inputs the program only reads indirectly).
  std::vector<std::string> universe_vars;
  // Enumeration refuses to build spaces larger than this many input pairs.
  std::int64_t max_enum_pairs = 2000000;
};

// ---------------------------------------------------------------------------
// Inputs and directives

// All variables that receive a value in generated inputs.
std::vector<std::string> input_universe(const Block& b, const PhiSpec& phi,
                                        const GenConfig& cfg);
// Secret memory addresses: [0, mem_size) minus the policy's public ranges.
std::vector<Int> secret_cells(const PhiSpec& phi, const GenConfig& cfg);

Input gen_input(Rng& rng, const std::vector<std::string>& vars, const PhiSpec& phi,
                const GenConfig& cfg);
// Same publics, fresh secrets; retries until the policy constraints hold on
// both sides (nullopt if that keeps failing).
std::optional<std::pair<Input, Input>> gen_related_pair(Rng& rng,
                                                        const std::vector<std::string>& vars,
                                                        const PhiSpec& phi,
                                                        const GenConfig& cfg);
// Every policy-related pair over the domain (throws CheckError if the space
// exceeds cfg.max_enum_pairs).
std::vector<std::pair<Input, Input>> enumerate_pairs(const std::vector<std::string>& vars,
                                                     const PhiSpec& phi, const GenConfig& cfg);
std::vector<Input> enumerate_inputs(const std::vector<std::string>& vars, const PhiSpec& phi,
                                    const GenConfig& cfg);

// Fixed-shape branch-directive sequences (length max_directives).
Directives gen_dirs(Rng& rng, DirStrategy strategy, const GenConfig& cfg);
// Every directive sequence a speculative run of p can consume on this input,
// found by probing (prefixes are cut off at max_directives).
std::vector<Directives> enumerate_directive_tree(const SourceProgram& p, const Input& input,
                                                 const GenConfig& cfg);

// Adaptive random supplier that records what it served (witness replay).
class RecordingRandomSupplier : public DirectiveSupplier {
public:
  RecordingRandomSupplier(Rng& rng, const GenConfig& cfg) : rng_(rng), cfg_(cfg) {}
  std::optional<Directive> next(const DirectiveRequest& req) override;
  const Directives& served() const { return served_; }

private:
  Rng& rng_;
  const GenConfig& cfg_;
  Directives served_;
};

// ---------------------------------------------------------------------------
// Trials and verdicts

struct CheckError : std::runtime_error {
  explicit CheckError(const std::string& what) : std::runtime_error(what) {}
};

enum class TrialOutcome { Pass, Vacuous, Violation };

struct TrialResult {
  TrialOutcome outcome = TrialOutcome::Vacuous;
  std::int64_t divergence = -1;  // first differing observation index
  bool partial = false;          // some run of the violating pair was incomplete
};

TrialResult compare_runs(const RunResult& r1, const RunResult& r2);

struct Witness {
  Input i1, i2;
  Directives dirs;
  std::int64_t divergence = -1;
  bool partial = false;
};

enum class VerdictResult {
  Violation,
  NoViolationExhaustive,
  NoViolationBounded,
  Inconclusive,
};

std::string verdict_result_name(VerdictResult r);

struct Verdict {
  VerdictResult result = VerdictResult::Inconclusive;
  std::int64_t trials = 0;      // total trials executed
  std::int64_t conclusive = 0;  // trials that passed
  std::int64_t vacuous = 0;
  std::uint64_t seed = 0;
  std::optional<Witness> witness;
};

// ---------------------------------------------------------------------------
// Checks

Verdict check_sct(const SourceProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                  DirStrategy strategy);
Verdict check_ct(const TargetProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                 DirStrategy strategy);
Verdict check_product(const TargetProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                      DirStrategy strategy);
Verdict check_taint(const TargetProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                    DirStrategy strategy);

// ---------------------------------------------------------------------------
// Transform correspondence (used by tests and the bench harness)

enum class MatchOutcome { Match, Mismatch, Skipped };

// Runs p speculatively and its speculation-passing translation sequentially
// on the same input and directives, and checks: statuses correspond
// (FenceHalt ↔ AssertError), the target trace equals t_obs(source trace),
// and the final stores agree (ignoring the translation's bookkeeping
// variables). Truncated runs are Skipped.
MatchOutcome check_correspondence(const SourceProgram& p, const Input& input,
                                  const Directives& dirs, const GenConfig& cfg,
                                  std::string* detail = nullptr);

}  // namespace sps
