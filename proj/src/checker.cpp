// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/checker.hpp"

#include <algorithm>
#include <set>

#include "sps/taint.hpp"
#include "sps/transform.hpp"

namespace sps {

std::string dir_strategy_name(DirStrategy s) {
  switch (s) {
    case DirStrategy::Random: return "random";
    case DirStrategy::AllTrue: return "all_true";
    case DirStrategy::AllFalse: return "all_false";
    case DirStrategy::FlipFirstK: return "flip_first_k";
    case DirStrategy::Enumerate: return "enumerate";
  }
  return "random";
}

DirStrategy dir_strategy_from_name(const std::string& s) {
  if (s == "random") return DirStrategy::Random;
  if (s == "all_true") return DirStrategy::AllTrue;
  if (s == "all_false") return DirStrategy::AllFalse;
  if (s == "flip_first_k") return DirStrategy::FlipFirstK;
  if (s == "enumerate") return DirStrategy::Enumerate;
  throw CheckError("unknown directive strategy: " + s);
}

std::string verdict_result_name(VerdictResult r) {
  switch (r) {
    case VerdictResult::Violation: return "violation";
    case VerdictResult::NoViolationExhaustive: return "no_violation_exhaustive";
    case VerdictResult::NoViolationBounded: return "no_violation_bounded";
    case VerdictResult::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// ---------------------------------------------------------------------------
// Inputs

std::vector<std::string> input_universe(const Block& b, const PhiSpec& phi,
                                        const GenConfig& cfg) {
  std::set<std::string> names;
  for (const auto& v : free_vars(b)) names.insert(v);
  for (const auto& v : phi.public_vars) names.insert(v);
  for (const auto& v : cfg.universe_vars) names.insert(v);
  for (const auto& e : phi.constraints) collect_vars(e, names);
  // The runner binds the directive list itself, and the transforms own their
  // bookkeeping registers; none of these are program inputs.
  for (const auto& r : reserved_names()) names.erase(r);
  names.erase("msf");
  return {names.begin(), names.end()};
}

std::vector<Int> secret_cells(const PhiSpec& phi, const GenConfig& cfg) {
  std::vector<Int> out;
  for (Int a = 0; a < cfg.mem_size; ++a) {
    if (!phi.mem_is_public(a)) out.push_back(a);
  }
  return out;
}

namespace {

std::vector<Int> domain_values(const GenConfig& cfg) {
  std::vector<Int> out;
  for (Int v = cfg.domain_lo; v <= cfg.domain_hi; ++v) out.push_back(v);
  if (out.empty()) out.push_back(cfg.domain_lo);
  return out;
}

Int rand_domain(Rng& rng, const GenConfig& cfg) {
  Int span = cfg.domain_hi - cfg.domain_lo + 1;
  if (span <= 0) return cfg.domain_lo;
  return cfg.domain_lo + Int(rng.range(0, static_cast<std::int64_t>(span) - 1));
}

}  // namespace

Input gen_input(Rng& rng, const std::vector<std::string>& vars, const PhiSpec& phi,
                const GenConfig& cfg) {
  Input in;
  for (const auto& v : vars) in.vars[v] = Value(rand_domain(rng, cfg));
  for (const auto& a : secret_cells(phi, cfg)) in.mem[a] = Value(rand_domain(rng, cfg));
  return in;
}

std::optional<std::pair<Input, Input>> gen_related_pair(Rng& rng,
                                                        const std::vector<std::string>& vars,
                                                        const PhiSpec& phi,
                                                        const GenConfig& cfg) {
  const int kAttempts = 200;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Input i1 = gen_input(rng, vars, phi, cfg);
    if (!phi.constraints_hold(i1)) continue;
    Input i2 = i1;
    for (const auto& v : vars) {
      if (!phi.var_is_public(v)) i2.vars[v] = Value(rand_domain(rng, cfg));
    }
    for (const auto& a : secret_cells(phi, cfg)) i2.mem[a] = Value(rand_domain(rng, cfg));
    if (!phi.constraints_hold(i2)) continue;
    return std::make_pair(std::move(i1), std::move(i2));
  }
  return std::nullopt;
}

namespace {

// Odometer over `slots` positions, each taking any of `values`.
class Odometer {
public:
  Odometer(size_t slots, const std::vector<Int>& values)
      : idx_(slots, 0), values_(values), fresh_(true) {}

  bool next() {
    if (fresh_) {
      fresh_ = false;
      return true;
    }
    for (size_t i = 0; i < idx_.size(); ++i) {
      if (++idx_[i] < values_.size()) return true;
      idx_[i] = 0;
    }
    return false;
  }

  const Int& at(size_t slot) const { return values_[idx_[slot]]; }

private:
  std::vector<size_t> idx_;
  const std::vector<Int>& values_;
  bool fresh_;
};

Int pow_int(Int base, size_t exp) {
  Int r = 1;
  for (size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

struct UniverseSplit {
  std::vector<std::string> public_vars;
  std::vector<std::string> secret_vars;
  std::vector<Int> cells;  // secret memory addresses
};

UniverseSplit split_universe(const std::vector<std::string>& vars, const PhiSpec& phi,
                             const GenConfig& cfg) {
  UniverseSplit s;
  for (const auto& v : vars) {
    (phi.var_is_public(v) ? s.public_vars : s.secret_vars).push_back(v);
  }
  s.cells = secret_cells(phi, cfg);
  return s;
}

}  // namespace

std::vector<Input> enumerate_inputs(const std::vector<std::string>& vars, const PhiSpec& phi,
                                    const GenConfig& cfg) {
  UniverseSplit u = split_universe(vars, phi, cfg);
  std::vector<Int> dom = domain_values(cfg);
  Int space = pow_int(Int(dom.size()), vars.size() + u.cells.size());
  if (space > cfg.max_enum_pairs) {
    throw CheckError("input enumeration space too large: " + space.str());
  }
  std::vector<Input> out;
  Odometer odo(vars.size() + u.cells.size(), dom);
  while (odo.next()) {
    Input in;
    size_t slot = 0;
    for (const auto& v : vars) in.vars[v] = Value(odo.at(slot++));
    for (const auto& a : u.cells) in.mem[a] = Value(odo.at(slot++));
    if (phi.constraints_hold(in)) out.push_back(std::move(in));
  }
  return out;
}

std::vector<std::pair<Input, Input>> enumerate_pairs(const std::vector<std::string>& vars,
                                                     const PhiSpec& phi, const GenConfig& cfg) {
  UniverseSplit u = split_universe(vars, phi, cfg);
  std::vector<Int> dom = domain_values(cfg);
  size_t secret_slots = u.secret_vars.size() + u.cells.size();
  Int space = pow_int(Int(dom.size()), u.public_vars.size()) *
              pow_int(Int(dom.size()), secret_slots) * pow_int(Int(dom.size()), secret_slots);
  if (space > cfg.max_enum_pairs) {
    throw CheckError("input pair enumeration space too large: " + space.str());
  }

  std::vector<std::pair<Input, Input>> out;
  Odometer pub(u.public_vars.size(), dom);
  while (pub.next()) {
    Input base;
    for (size_t i = 0; i < u.public_vars.size(); ++i) base.vars[u.public_vars[i]] = Value(pub.at(i));

    // Materialize one side's secret choices, then pair with every choice for
    // the other side.
    std::vector<Input> sides;
    Odometer sec(secret_slots, dom);
    while (sec.next()) {
      Input in = base;
      size_t slot = 0;
      for (const auto& v : u.secret_vars) in.vars[v] = Value(sec.at(slot++));
      for (const auto& a : u.cells) in.mem[a] = Value(sec.at(slot++));
      if (phi.constraints_hold(in)) sides.push_back(std::move(in));
    }
    for (const auto& i1 : sides) {
      for (const auto& i2 : sides) out.emplace_back(i1, i2);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Directives

Directives gen_dirs(Rng& rng, DirStrategy strategy, const GenConfig& cfg) {
  Directives out;
  out.reserve(static_cast<size_t>(cfg.max_directives));
  for (int i = 0; i < cfg.max_directives; ++i) {
    switch (strategy) {
      case DirStrategy::Random:
        out.push_back(Directive::force_of(rng.chance(cfg.flip_prob)));
        break;
      case DirStrategy::AllTrue:
        out.push_back(Directive::force_of(true));
        break;
      case DirStrategy::AllFalse:
        out.push_back(Directive::force_of(false));
        break;
      case DirStrategy::FlipFirstK:
        out.push_back(Directive::force_of(i >= cfg.flip_k));
        break;
      case DirStrategy::Enumerate:
        throw CheckError("enumerate strategy does not sample directive sequences");
    }
  }
  return out;
}

std::optional<Directive> RecordingRandomSupplier::next(const DirectiveRequest& req) {
  if (served_.size() >= static_cast<size_t>(cfg_.max_directives)) return std::nullopt;
  Directive d;
  if (req.kind == Directive::Kind::Force) {
    d = Directive::force_of(rng_.chance(cfg_.flip_prob));
  } else {
    std::int64_t depth = req.hist_depth > 0 ? static_cast<std::int64_t>(req.hist_depth) : 1;
    d = Directive::load_of(Int(rng_.range(0, depth - 1)));
  }
  served_.push_back(d);
  return d;
}

namespace {

// Serves a fixed prefix; remembers the first request past its end.
class ProbeSupplier : public DirectiveSupplier {
public:
  explicit ProbeSupplier(const Directives& prefix) : prefix_(prefix) {}
  std::optional<Directive> next(const DirectiveRequest& req) override {
    if (pos_ < prefix_.size()) return prefix_[pos_++];
    if (!pending_) pending_ = req;
    return std::nullopt;
  }
  const std::optional<DirectiveRequest>& pending() const { return pending_; }

private:
  const Directives& prefix_;
  size_t pos_ = 0;
  std::optional<DirectiveRequest> pending_;
};

void dfs_directives(const SourceProgram& p, const Input& input, const GenConfig& cfg,
                    Directives& prefix, std::vector<Directives>& out) {
  ProbeSupplier probe(prefix);
  run_spec_with(p, input, probe, cfg.model, cfg.variant, cfg.fuel);
  if (!probe.pending() || prefix.size() >= static_cast<size_t>(cfg.max_directives)) {
    out.push_back(prefix);
    return;
  }
  if (probe.pending()->kind == Directive::Kind::Force) {
    // Not-taken first: the shortest witnesses start with a mispredicted exit.
    prefix.push_back(Directive::force_of(false));
    dfs_directives(p, input, cfg, prefix, out);
    prefix.back() = Directive::force_of(true);
    dfs_directives(p, input, cfg, prefix, out);
    prefix.pop_back();
    return;
  }
  Int depth = probe.pending()->hist_depth;
  if (depth < 1) depth = 1;
  for (Int k = 0; k < depth; ++k) {
    prefix.push_back(Directive::load_of(k));
    dfs_directives(p, input, cfg, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Directives> enumerate_directive_tree(const SourceProgram& p, const Input& input,
                                                 const GenConfig& cfg) {
  std::vector<Directives> out;
  Directives prefix;
  dfs_directives(p, input, cfg, prefix, out);
  return out;
}

// ---------------------------------------------------------------------------
// Trials

TrialResult compare_runs(const RunResult& r1, const RunResult& r2) {
  const Trace& t1 = r1.trace;
  const Trace& t2 = r2.trace;
  bool both_final = r1.is_final() && r2.is_final();
  size_t n = std::min(t1.size(), t2.size());
  for (size_t i = 0; i < n; ++i) {
    if (t1[i] != t2[i]) {
      return {TrialOutcome::Violation, static_cast<std::int64_t>(i), !both_final};
    }
  }
  if (t1.size() == t2.size()) {
    return {both_final ? TrialOutcome::Pass : TrialOutcome::Vacuous, -1, false};
  }
  // Prefix relation. If the shorter run is complete, the longer one already
  // observed something extra; if it was merely cut off, nothing is decided.
  const RunResult& shorter = t1.size() < t2.size() ? r1 : r2;
  if (shorter.is_final()) {
    return {TrialOutcome::Violation, static_cast<std::int64_t>(n), !both_final};
  }
  return {TrialOutcome::Vacuous, -1, false};
}

namespace {

struct Aggregator {
  Verdict v;
  bool found = false;

  explicit Aggregator(std::uint64_t seed) { v.seed = seed; }

  // Returns true when the check can stop.
  bool add(const TrialResult& tr, const Input& i1, const Input& i2, const Directives& dirs) {
    ++v.trials;
    switch (tr.outcome) {
      case TrialOutcome::Pass:
        ++v.conclusive;
        return false;
      case TrialOutcome::Vacuous:
        ++v.vacuous;
        return false;
      case TrialOutcome::Violation:
        found = true;
        v.witness = Witness{i1, i2, dirs, tr.divergence, tr.partial};
        return true;
    }
    return false;
  }

  Verdict finish(bool exhaustive) {
    if (found) {
      v.result = VerdictResult::Violation;
    } else if (v.trials == 0) {
      v.result = VerdictResult::Inconclusive;
    } else if (exhaustive) {
      v.result = VerdictResult::NoViolationExhaustive;
    } else {
      v.result = v.conclusive > 0 ? VerdictResult::NoViolationBounded
                                  : VerdictResult::Inconclusive;
    }
    return std::move(v);
  }
};

std::vector<Directives> all_force_lists(const GenConfig& cfg) {
  if (cfg.max_directives > 20) {
    throw CheckError("directive enumeration bound too large for exhaustive force lists");
  }
  std::vector<Directives> out;
  std::uint64_t total = std::uint64_t(1) << cfg.max_directives;
  out.reserve(total);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Directives d;
    d.reserve(static_cast<size_t>(cfg.max_directives));
    for (int i = 0; i < cfg.max_directives; ++i) {
      d.push_back(Directive::force_of((mask >> i) & 1));
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::set<Directives> pair_directive_union(const SourceProgram& p, const Input& i1,
                                          const Input& i2, const GenConfig& cfg) {
  std::set<Directives> all;
  for (auto& d : enumerate_directive_tree(p, i1, cfg)) all.insert(std::move(d));
  for (auto& d : enumerate_directive_tree(p, i2, cfg)) all.insert(std::move(d));
  return all;
}

}  // namespace

// ---------------------------------------------------------------------------
// Checks

Verdict check_sct(const SourceProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                  DirStrategy strategy) {
  auto vars = input_universe(p.cmds, phi, cfg);
  Aggregator agg(cfg.seed);

  if (strategy == DirStrategy::Enumerate) {
    for (const auto& [i1, i2] : enumerate_pairs(vars, phi, cfg)) {
      for (const auto& d : pair_directive_union(p, i1, i2, cfg)) {
        RunResult r1 = run_spec(p, i1, d, cfg.model, cfg.variant, cfg.fuel);
        RunResult r2 = run_spec(p, i2, d, cfg.model, cfg.variant, cfg.fuel);
        if (agg.add(compare_runs(r1, r2), i1, i2, d)) return agg.finish(true);
      }
    }
    return agg.finish(true);
  }

  Rng rng(cfg.seed);
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    auto pair = gen_related_pair(rng, vars, phi, cfg);
    if (!pair) {
      ++agg.v.trials;
      ++agg.v.vacuous;
      continue;
    }
    Directives d;
    RunResult r1;
    if (strategy == DirStrategy::Random) {
      RecordingRandomSupplier supplier(rng, cfg);
      r1 = run_spec_with(p, pair->first, supplier, cfg.model, cfg.variant, cfg.fuel);
      d = supplier.served();
    } else {
      d = gen_dirs(rng, strategy, cfg);
      r1 = run_spec(p, pair->first, d, cfg.model, cfg.variant, cfg.fuel);
    }
    RunResult r2 = run_spec(p, pair->second, d, cfg.model, cfg.variant, cfg.fuel);
    if (agg.add(compare_runs(r1, r2), pair->first, pair->second, d)) break;
  }
  return agg.finish(false);
}

Verdict check_ct(const TargetProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                 DirStrategy strategy) {
  auto vars = input_universe(p.cmds, phi, cfg);
  Aggregator agg(cfg.seed);

  if (strategy == DirStrategy::Enumerate) {
    auto dir_lists = all_force_lists(cfg);
    for (const auto& [i1, i2] : enumerate_pairs(vars, phi, cfg)) {
      for (const auto& d : dir_lists) {
        RunResult r1 = run_seq(p, i1, d, cfg.model, cfg.fuel);
        RunResult r2 = run_seq(p, i2, d, cfg.model, cfg.fuel);
        if (agg.add(compare_runs(r1, r2), i1, i2, d)) return agg.finish(true);
      }
    }
    return agg.finish(true);
  }

  Rng rng(cfg.seed);
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    auto pair = gen_related_pair(rng, vars, phi, cfg);
    if (!pair) {
      ++agg.v.trials;
      ++agg.v.vacuous;
      continue;
    }
    Directives d = gen_dirs(rng, strategy, cfg);
    RunResult r1 = run_seq(p, pair->first, d, cfg.model, cfg.fuel);
    RunResult r2 = run_seq(p, pair->second, d, cfg.model, cfg.fuel);
    if (agg.add(compare_runs(r1, r2), pair->first, pair->second, d)) break;
  }
  return agg.finish(false);
}

namespace {

Input merge_product_input(const Input& i1, const Input& i2, const Int& offset) {
  Input m;
  for (const auto& [k, v] : i1.vars) m.vars[k + "_1"] = v;
  for (const auto& [k, v] : i2.vars) m.vars[k + "_2"] = v;
  for (const auto& [a, v] : i1.mem) m.mem[a] = v;
  for (const auto& [a, v] : i2.mem) m.mem[a + offset] = v;
  return m;
}

TrialResult product_trial(const TargetProgram& pq, const Input& i1, const Input& i2,
                          const Directives& d, const GenConfig& cfg) {
  // The product does both copies' work in one pass, plus the assertions.
  Input merged = merge_product_input(i1, i2, cfg.product_offset);
  RunResult r = run_seq(pq, merged, d, cfg.model, cfg.fuel * 3, {"dir_1", "dir_2"});
  if (r.status == RunStatus::AssertError) return {TrialOutcome::Violation, -1, false};
  if (r.status == RunStatus::Completed) return {TrialOutcome::Pass, -1, false};
  return {TrialOutcome::Vacuous, -1, false};
}

}  // namespace

Verdict check_product(const TargetProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                      DirStrategy strategy) {
  TargetProgram pq = product(assert_elim(p), cfg.model, cfg.product_offset);
  auto vars = input_universe(p.cmds, phi, cfg);
  Aggregator agg(cfg.seed);

  if (strategy == DirStrategy::Enumerate) {
    auto dir_lists = all_force_lists(cfg);
    for (const auto& [i1, i2] : enumerate_pairs(vars, phi, cfg)) {
      for (const auto& d : dir_lists) {
        if (agg.add(product_trial(pq, i1, i2, d, cfg), i1, i2, d)) return agg.finish(true);
      }
    }
    return agg.finish(true);
  }

  Rng rng(cfg.seed);
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    auto pair = gen_related_pair(rng, vars, phi, cfg);
    if (!pair) {
      ++agg.v.trials;
      ++agg.v.vacuous;
      continue;
    }
    Directives d = gen_dirs(rng, strategy, cfg);
    if (agg.add(product_trial(pq, pair->first, pair->second, d, cfg), pair->first,
                pair->second, d)) {
      break;
    }
  }
  return agg.finish(false);
}

Verdict check_taint(const TargetProgram& p, const PhiSpec& phi, const GenConfig& cfg,
                    DirStrategy strategy) {
  auto vars = input_universe(p.cmds, phi, cfg);
  Aggregator agg(cfg.seed);

  auto trial = [&](const Input& in, const Directives& d) {
    TaintResult tr = taint_run(p, phi, in, d, cfg.model, cfg.fuel);
    TrialResult res;
    if (tr.flagged) {
      res.outcome = TrialOutcome::Violation;
      res.divergence = tr.violations.front().step;
      res.partial = !tr.run.is_final();
    } else {
      res.outcome = tr.run.is_final() ? TrialOutcome::Pass : TrialOutcome::Vacuous;
    }
    return res;
  };

  if (strategy == DirStrategy::Enumerate) {
    auto dir_lists = all_force_lists(cfg);
    for (const auto& in : enumerate_inputs(vars, phi, cfg)) {
      for (const auto& d : dir_lists) {
        if (agg.add(trial(in, d), in, in, d)) return agg.finish(true);
      }
    }
    return agg.finish(true);
  }

  Rng rng(cfg.seed);
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    Input in = gen_input(rng, vars, phi, cfg);
    if (!phi.constraints_hold(in)) {
      ++agg.v.trials;
      ++agg.v.vacuous;
      continue;
    }
    Directives d = gen_dirs(rng, strategy, cfg);
    if (agg.add(trial(in, d), in, in, d)) break;
  }
  return agg.finish(false);
}

// ---------------------------------------------------------------------------
// Correspondence

namespace {

bool final_vars_agree(const Env& a, const Env& b, std::string* who) {
  std::set<std::string> keys;
  for (const auto& [k, _] : a) keys.insert(k);
  for (const auto& [k, _] : b) keys.insert(k);
  for (const auto& r : reserved_names()) keys.erase(r);
  for (const auto& k : keys) {
    if (env_get(a, k) != env_get(b, k)) {
      if (who) *who = k;
      return false;
    }
  }
  return true;
}

}  // namespace

MatchOutcome check_correspondence(const SourceProgram& p, const Input& input,
                                  const Directives& dirs, const GenConfig& cfg,
                                  std::string* detail) {
  RunResult rs = run_spec(p, input, dirs, cfg.model, cfg.variant, cfg.fuel);
  TargetProgram q = cfg.variant == SpectreVariant::V4 ? sps_v4(p) : sps(p);
  RunResult rq = run_seq(q, input, dirs, cfg.model, cfg.fuel);

  auto truncated = [](const RunResult& r) {
    return r.status == RunStatus::OutOfDirectives || r.status == RunStatus::OutOfFuel;
  };
  if (truncated(rs) || truncated(rq)) return MatchOutcome::Skipped;

  auto fail = [&](const std::string& why) {
    if (detail) {
      *detail = why + " (spec " + run_status_name(rs.status) + ", target " +
                run_status_name(rq.status) + ")";
    }
    return MatchOutcome::Mismatch;
  };

  RunStatus expect =
      rs.status == RunStatus::FenceHalt ? RunStatus::AssertError : rs.status;
  if (rq.status != expect) return fail("status mismatch");

  Trace expected;
  try {
    expected = t_obs(rs.trace, dirs);
  } catch (const std::invalid_argument& e) {
    return fail(std::string("trace mapping failed: ") + e.what());
  }
  if (rq.trace != expected) {
    return fail("trace mismatch: expected " + trace_to_string(expected) + ", got " +
                trace_to_string(rq.trace));
  }

  std::string var;
  if (!final_vars_agree(rs.rho, rq.rho, &var)) return fail("final value of '" + var + "' differs");
  if (rs.mem != rq.mem) return fail("final memory differs");

  const Value& ms = env_get(rq.rho, "ms");
  if (!ms.is_bool() || ms.as_bool() != rs.ms) return fail("misspeculation bit differs");

  return MatchOutcome::Match;
}

}  // namespace sps
