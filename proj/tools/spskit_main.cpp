// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT
//
// spskit — command-line front end.
//
//   parse      parse a program and print its canonical form
//   transform  sps | sps-v4 | assert-elim | leak-inst | product
//   run        spec | seq interpreter on one (input, directives)
//   check      sct | ct | product | taint | oracle
//   replay     re-run a stored witness against a program
//   bench      run every corpus case and compare against its manifest
//
// Exit codes: 0 success / no violation; 1 violation (or bench mismatch);
// 2 parse, validation or usage error; 3 assertion failure (run); 4 other
// run failure (or oracle disagreement); 5 inconclusive check.
// SPSKIT_SEED overrides the default seed when --seed is not given.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sps/checker.hpp"
#include "sps/corpus.hpp"
#include "sps/json_io.hpp"
#include "sps/parser.hpp"
#include "sps/pretty.hpp"
#include "sps/semantics.hpp"
#include "sps/transform.hpp"

namespace {

using sps::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAssert = 3;
constexpr int kExitRunError = 4;
constexpr int kExitInconclusive = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write " + out_path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void emit_json(const ordered_json& j, const std::string& out_path) { emit(j.dump(2), out_path); }

// Flags shared by run/check/replay that override GenConfig defaults.
struct CfgFlags {
  std::string model;
  std::string variant;
  std::string domain;  // "lo:hi"
  std::int64_t line_size = 64;
  std::optional<std::int64_t> mem_size;
  std::optional<int> max_dirs;
  std::optional<std::int64_t> trials;
  std::optional<std::int64_t> fuel;
  std::optional<std::uint64_t> seed;
  std::optional<double> flip_prob;
  std::optional<int> flip_k;
  std::optional<std::int64_t> max_enum_pairs;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--model", model, "leakage model: baseline|cacheline|vartime");
    cmd->add_option("--line", line_size, "cache line size for --model cacheline")
        ->default_val(64);
    cmd->add_option("--variant", variant, "speculation variant: v1|v4");
    cmd->add_option("--domain", domain, "input value domain \"lo:hi\"");
    cmd->add_option("--mem-size", mem_size, "secret/public memory region is [0, mem-size)");
    cmd->add_option("--max-dirs", max_dirs, "directive sequence length bound");
    cmd->add_option("--trials", trials, "sampling trial count");
    cmd->add_option("--fuel", fuel, "interpreter step budget");
    cmd->add_option("--seed", seed, "random seed (default 42, env SPSKIT_SEED)");
    cmd->add_option("--flip-prob", flip_prob, "random strategy: probability of a taken directive");
    cmd->add_option("--flip-k", flip_k, "flip_first_k strategy: leading mispredictions");
    cmd->add_option("--max-enum-pairs", max_enum_pairs, "enumeration size refusal threshold");
  }

  void apply(sps::GenConfig& cfg) const {
    if (!model.empty()) cfg.model = sps::LeakageModel::from_name(model, sps::Int(line_size));
    if (!variant.empty()) cfg.variant = sps::variant_from_name(variant);
    if (!domain.empty()) {
      const auto colon = domain.find(':');
      if (colon == std::string::npos) throw UsageError("--domain wants \"lo:hi\"");
      cfg.domain_lo = sps::Int(domain.substr(0, colon));
      cfg.domain_hi = sps::Int(domain.substr(colon + 1));
    }
    if (mem_size) cfg.mem_size = sps::Int(*mem_size);
    if (max_dirs) cfg.max_directives = *max_dirs;
    if (trials) cfg.trials = *trials;
    if (fuel) cfg.fuel = *fuel;
    if (seed) {
      cfg.seed = *seed;
    } else if (const char* env = std::getenv("SPSKIT_SEED")) {
      cfg.seed = std::strtoull(env, nullptr, 10);
    }
    if (flip_prob) cfg.flip_prob = *flip_prob;
    if (flip_k) cfg.flip_k = *flip_k;
    if (max_enum_pairs) cfg.max_enum_pairs = *max_enum_pairs;
  }
};

sps::Directives read_dirs(const std::string& dirs, const std::string& dirs_file) {
  if (!dirs_file.empty()) return sps::dirs_from_string(slurp(dirs_file));
  return sps::dirs_from_string(dirs);
}

// A check/replay target is either a case directory (program.sps + phi.json +
// manifest defaults) or a bare program file plus an optional --phi file.
struct CheckTarget {
  sps::SourceProgram program;
  // Set instead of `program` when the file only parses in the target dialect
  // (e.g. it is the output of `transform sps`): the sequential checks use it
  // as-is rather than translating again.
  std::optional<sps::TargetProgram> translated;
  sps::PhiSpec phi;
  sps::GenConfig cfg;
  std::optional<sps::DirStrategy> strategy;  // manifest-pinned, if any
};

CheckTarget load_check_target(const std::string& path, const std::string& phi_path) {
  CheckTarget t;
  if (std::filesystem::is_directory(path)) {
    sps::CorpusCase c = sps::load_case(path);
    t.program = std::move(c.program);
    t.phi = std::move(c.phi);
    t.cfg = c.cfg;
    t.strategy = c.strategy;
    return t;
  }
  const std::string text = slurp(path);
  try {
    t.program = sps::parse_source(text);
  } catch (const sps::ParseError& source_err) {
    try {
      t.translated = sps::parse_target(text);
    } catch (const sps::ParseError&) {
      throw source_err;  // the file is broken in both dialects; report as source
    }
  }
  if (!phi_path.empty())
    t.phi = sps::phi_from_json(ordered_json::parse(slurp(phi_path)), &t.cfg.universe_vars);
  return t;
}

// The speculative checks need the source program; the sequential ones accept
// either a source program (translated here) or an already-translated file.
sps::TargetProgram translation_of(const CheckTarget& t) {
  if (t.translated) return *t.translated;
  return t.cfg.variant == sps::SpectreVariant::V4 ? sps::sps_v4(t.program) : sps::sps(t.program);
}

void require_source_dialect(const CheckTarget& t, const std::string& what) {
  if (t.translated) {
    throw UsageError(what + " needs a source-dialect program; this file only parses in the "
                            "target dialect (already translated?)");
  }
}

int verdict_exit(const sps::Verdict& v) {
  switch (v.result) {
    case sps::VerdictResult::Violation: return kExitViolation;
    case sps::VerdictResult::Inconclusive: return kExitInconclusive;
    default: return kExitOk;
  }
}

int run_exit(const sps::RunResult& r) {
  switch (r.status) {
    case sps::RunStatus::Completed:
    case sps::RunStatus::FenceHalt: return kExitOk;
    case sps::RunStatus::AssertError: return kExitAssert;
    default: return kExitRunError;
  }
}

ordered_json state_json(const sps::RunResult& r) {
  ordered_json j;
  ordered_json rho = ordered_json::object();
  for (const auto& [name, v] : r.rho) rho[name] = sps::value_to_json(v);
  ordered_json mem = ordered_json::object();
  for (const auto& [addr, hist] : r.mem.cells()) {
    ordered_json h = ordered_json::array();
    for (const auto& v : hist) h.push_back(sps::value_to_json(v));
    mem[addr.str()] = std::move(h);
  }
  j["rho"] = std::move(rho);
  j["mem"] = std::move(mem);
  j["ms"] = r.ms;
  return j;
}

std::string bench_text(const std::vector<sps::BenchRow>& rows) {
  std::ostringstream os;
  std::size_t name_w = 4;
  for (const auto& r : rows) name_w = std::max(name_w, r.name.size());
  os << std::left << std::setw(static_cast<int>(name_w + 2)) << "case" << std::setw(9) << "check"
     << std::setw(14) << "strategy" << std::setw(13) << "expected" << std::setw(26) << "actual"
     << std::setw(8) << "trials" << std::setw(10) << "ms" << "ok\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(name_w + 2)) << r.name << std::setw(9) << r.check
       << std::setw(14) << r.strategy << std::setw(13) << r.expected << std::setw(26)
       << sps::verdict_result_name(r.actual) << std::setw(8) << r.trials << std::setw(10)
       << std::fixed << std::setprecision(1) << r.millis << (r.ok ? "yes" : "MISMATCH") << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_parse(const std::string& path, bool target, const std::string& out) {
  const std::string text = slurp(path);
  if (target) {
    emit(sps::pretty(sps::parse_target(text)), out);
  } else {
    emit(sps::pretty(sps::parse_source(text)), out);
  }
  return kExitOk;
}

int cmd_transform(const std::string& kind, const std::string& path, const std::string& out,
                  const CfgFlags& flags) {
  sps::GenConfig cfg;
  flags.apply(cfg);
  const std::string text = slurp(path);
  sps::TargetProgram result;
  if (kind == "sps") {
    result = sps::sps(sps::parse_source(text));
  } else if (kind == "sps-v4") {
    result = sps::sps_v4(sps::parse_source(text));
  } else if (kind == "assert-elim") {
    result = sps::assert_elim(sps::parse_target(text));
  } else if (kind == "leak-inst") {
    result = sps::leak_instrument(sps::parse_target(text), cfg.model);
  } else if (kind == "product") {
    result = sps::product(sps::parse_target(text), cfg.model, cfg.product_offset);
  } else {
    throw UsageError("unknown transform kind: " + kind +
                     " (want sps|sps-v4|assert-elim|leak-inst|product)");
  }
  emit(sps::pretty(result), out);
  return kExitOk;
}

int cmd_run(const std::string& mode, const std::string& path, const std::string& input_path,
            const std::string& dirs_str, const std::string& dirs_file, bool with_state,
            const std::string& out, const CfgFlags& flags) {
  sps::GenConfig cfg;
  flags.apply(cfg);
  sps::Input input;
  if (!input_path.empty()) input = sps::input_from_json(ordered_json::parse(slurp(input_path)));
  const sps::Directives dirs = read_dirs(dirs_str, dirs_file);

  sps::RunResult r;
  if (mode == "spec") {
    r = sps::run_spec(sps::parse_source(slurp(path)), input, dirs, cfg.model, cfg.variant,
                      cfg.fuel);
  } else if (mode == "seq") {
    r = sps::run_seq(sps::parse_target(slurp(path)), input, dirs, cfg.model, cfg.fuel);
  } else {
    throw UsageError("unknown run mode: " + mode + " (want spec|seq)");
  }
  ordered_json j = sps::run_result_to_json(r);
  if (with_state) j["state"] = state_json(r);
  emit_json(j, out);
  return run_exit(r);
}

int cmd_check(const std::string& kind, const std::string& path, const std::string& phi_path,
              const std::string& strategy_name, const std::string& out, const CfgFlags& flags) {
  CheckTarget t = load_check_target(path, phi_path);
  flags.apply(t.cfg);
  sps::DirStrategy strategy = t.strategy.value_or(sps::DirStrategy::Random);
  if (!strategy_name.empty()) strategy = sps::dir_strategy_from_name(strategy_name);

  if (kind == "oracle") {
    // Reduction cross-check: the speculative verdict of p must agree with the
    // sequential verdict of its speculation-passing translation.
    require_source_dialect(t, "check oracle");
    const sps::Verdict sct = sps::check_sct(t.program, t.phi, t.cfg, strategy);
    const sps::Verdict ct = sps::check_ct(translation_of(t), t.phi, t.cfg, strategy);
    const bool agree = sct.result == ct.result;
    ordered_json j;
    j["sct"] = sps::verdict_to_json(sct);
    j["ct"] = sps::verdict_to_json(ct);
    j["agree"] = agree;
    emit_json(j, out);
    if (!agree) return kExitRunError;
    return verdict_exit(sct);
  }

  sps::Verdict v;
  if (kind == "sct") {
    require_source_dialect(t, "check sct");
    v = sps::check_sct(t.program, t.phi, t.cfg, strategy);
  } else if (kind == "ct") {
    v = sps::check_ct(translation_of(t), t.phi, t.cfg, strategy);
  } else if (kind == "product") {
    v = sps::check_product(translation_of(t), t.phi, t.cfg, strategy);
  } else if (kind == "taint") {
    v = sps::check_taint(translation_of(t), t.phi, t.cfg, strategy);
  } else {
    throw UsageError("unknown check kind: " + kind + " (want sct|ct|product|taint|oracle)");
  }
  emit_json(sps::verdict_to_json(v), out);
  return verdict_exit(v);
}

int cmd_replay(const std::string& witness_path, const std::string& path,
               const std::string& phi_path, const std::string& kind, const std::string& out,
               const CfgFlags& flags) {
  CheckTarget t = load_check_target(path, phi_path);
  flags.apply(t.cfg);
  const ordered_json wj = ordered_json::parse(slurp(witness_path));
  const sps::Witness w = sps::witness_from_json(wj.contains("witness") ? wj.at("witness") : wj);

  sps::RunResult r1, r2;
  if (kind == "sct") {
    require_source_dialect(t, "replay --kind sct");
    r1 = sps::run_spec(t.program, w.i1, w.dirs, t.cfg.model, t.cfg.variant, t.cfg.fuel);
    r2 = sps::run_spec(t.program, w.i2, w.dirs, t.cfg.model, t.cfg.variant, t.cfg.fuel);
  } else if (kind == "ct") {
    const sps::TargetProgram translated = translation_of(t);
    r1 = sps::run_seq(translated, w.i1, w.dirs, t.cfg.model, t.cfg.fuel);
    r2 = sps::run_seq(translated, w.i2, w.dirs, t.cfg.model, t.cfg.fuel);
  } else {
    throw UsageError("unknown replay kind: " + kind + " (want sct|ct)");
  }
  const sps::TrialResult res = sps::compare_runs(r1, r2);
  ordered_json j;
  j["reproduced"] = res.outcome == sps::TrialOutcome::Violation;
  j["divergence"] = res.divergence;
  j["partial"] = res.partial;
  j["run1"] = sps::run_result_to_json(r1);
  j["run2"] = sps::run_result_to_json(r2);
  emit_json(j, out);
  return res.outcome == sps::TrialOutcome::Violation ? kExitViolation : kExitOk;
}

int cmd_bench(const std::string& corpus_path, const std::string& model_override,
              std::int64_t line_size, const std::string& format, const std::string& out) {
  std::vector<sps::CorpusCase> cases = sps::load_corpus(corpus_path);
  if (cases.empty()) {
    std::cerr << "spskit: corpus at " << corpus_path << " contains no cases\n";
    return kExitUsage;
  }
  if (!model_override.empty()) {
    for (auto& c : cases) {
      c.model = model_override;
      c.cfg.model = sps::LeakageModel::from_name(model_override, sps::Int(line_size));
    }
  }
  const std::vector<sps::BenchRow> rows = sps::bench_corpus(cases);
  bool all_ok = true;
  for (const auto& r : rows) all_ok = all_ok && r.ok;
  if (format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j;
      j["name"] = r.name;
      j["check"] = r.check;
      j["strategy"] = r.strategy;
      j["expected"] = r.expected;
      j["actual"] = sps::verdict_result_name(r.actual);
      j["trials"] = r.trials;
      j["ok"] = r.ok;
      arr.push_back(std::move(j));
    }
    emit_json(arr, out);
  } else {
    emit(bench_text(rows), out);
  }
  return all_ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spskit — speculation-passing-style toolkit"};
  app.require_subcommand(1);

  // parse
  std::string parse_path, parse_out;
  bool parse_target_dialect = false;
  auto* parse_cmd = app.add_subcommand("parse", "parse a program and print its canonical form");
  parse_cmd->add_option("program", parse_path, "program file")->required();
  parse_cmd->add_flag("--target", parse_target_dialect,
                      "parse the target dialect (transform output)");
  parse_cmd->add_option("--out", parse_out, "write to file instead of stdout");

  // transform
  std::string tr_kind, tr_path, tr_out;
  CfgFlags tr_flags;
  auto* tr_cmd = app.add_subcommand("transform", "apply a program transformation");
  tr_cmd->add_option("kind", tr_kind, "sps|sps-v4|assert-elim|leak-inst|product")->required();
  tr_cmd->add_option("program", tr_path, "program file")->required();
  tr_cmd->add_option("--out", tr_out, "write to file instead of stdout");
  tr_flags.add_to(tr_cmd);

  // run
  std::string run_mode, run_path, run_input, run_dirs, run_dirs_file, run_out;
  bool run_state = false;
  CfgFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run one program on one (input, directives)");
  run_cmd->add_option("mode", run_mode, "spec|seq")->required();
  run_cmd->add_option("program", run_path, "program file")->required();
  run_cmd->add_option("--input", run_input, "input JSON file");
  run_cmd->add_option("--dirs", run_dirs, "directive string, e.g. FTTL0");
  run_cmd->add_option("--dirs-file", run_dirs_file, "file holding a directive string");
  run_cmd->add_flag("--state", run_state, "include final variables and memory in the output");
  run_cmd->add_option("--out", run_out, "write to file instead of stdout");
  run_flags.add_to(run_cmd);

  // check
  std::string chk_kind, chk_path, chk_phi, chk_strategy, chk_out;
  CfgFlags chk_flags;
  auto* chk_cmd = app.add_subcommand("check", "run a security check");
  chk_cmd->add_option("kind", chk_kind, "sct|ct|product|taint|oracle")->required();
  chk_cmd
      ->add_option("program", chk_path,
                   "program file or corpus case directory (ct|product|taint also accept "
                   "already-translated target-dialect files)")
      ->required();
  chk_cmd->add_option("--phi", chk_phi, "policy JSON file (for bare program files)");
  chk_cmd->add_option("--strategy", chk_strategy,
                      "random|all_true|all_false|flip_first_k|enumerate");
  chk_cmd->add_option("--out", chk_out, "write to file instead of stdout");
  chk_flags.add_to(chk_cmd);

  // replay
  std::string rp_witness, rp_path, rp_phi, rp_kind = "sct", rp_out;
  CfgFlags rp_flags;
  auto* rp_cmd = app.add_subcommand("replay", "re-run a stored witness");
  rp_cmd->add_option("witness", rp_witness, "witness JSON (or a verdict holding one)")->required();
  rp_cmd->add_option("program", rp_path, "program file or corpus case directory")->required();
  rp_cmd->add_option("--phi", rp_phi, "policy JSON file");
  rp_cmd->add_option("--kind", rp_kind, "sct|ct (default sct)");
  rp_cmd->add_option("--out", rp_out, "write to file instead of stdout");
  rp_flags.add_to(rp_cmd);

  // bench
  std::string bench_path, bench_model, bench_format = "text", bench_out;
  std::int64_t bench_line = 64;
  auto* bench_cmd = app.add_subcommand("bench", "run the corpus against its manifests");
  bench_cmd->add_option("corpus", bench_path, "corpus directory")->required();
  bench_cmd->add_option("--model", bench_model, "override every case's leakage model");
  bench_cmd->add_option("--line", bench_line, "cache line size for --model cacheline");
  bench_cmd->add_option("--format", bench_format, "text|json");
  bench_cmd->add_option("--out", bench_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(parse_path, parse_target_dialect, parse_out);
    if (tr_cmd->parsed()) return cmd_transform(tr_kind, tr_path, tr_out, tr_flags);
    if (run_cmd->parsed())
      return cmd_run(run_mode, run_path, run_input, run_dirs, run_dirs_file, run_state, run_out,
                     run_flags);
    if (chk_cmd->parsed())
      return cmd_check(chk_kind, chk_path, chk_phi, chk_strategy, chk_out, chk_flags);
    if (rp_cmd->parsed())
      return cmd_replay(rp_witness, rp_path, rp_phi, rp_kind, rp_out, rp_flags);
    if (bench_cmd->parsed())
      return cmd_bench(bench_path, bench_model, bench_line, bench_format, bench_out);
  } catch (const sps::ParseError& e) {
    std::cerr << "spskit: parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sps::TransformError& e) {
    std::cerr << "spskit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sps::JsonError& e) {
    std::cerr << "spskit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sps::CorpusError& e) {
    std::cerr << "spskit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sps::CheckError& e) {
    std::cerr << "spskit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "spskit: bad JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "spskit: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
