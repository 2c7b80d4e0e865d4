// Copyright (c) 2026 spskit contributors
// SPDX-License-Identifier: MIT

#include "sps/gen.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sps {

namespace {

class Generator {
public:
  Generator(Rng& rng, const ProgGenConfig& cfg) : rng_(rng), cfg_(cfg) {
    for (int i = 0; i < cfg.num_vars; ++i) vars_.push_back("v" + std::to_string(i));
  }

  Block block(int depth, int len, const std::string& forbidden) {
    Block out;
    for (int i = 0; i < len; ++i) cmd(depth, forbidden, out);
    if (out.empty()) out.push_back(cmd_skip());
    return out;
  }

  std::string pick_var() { return vars_[static_cast<size_t>(rng_.range(0, cfg_.num_vars - 1))]; }

  std::string pick_var_except(const std::string& forbidden) {
    if (cfg_.num_vars <= 1) return vars_.front();
    for (int i = 0; i < 8; ++i) {
      std::string v = pick_var();
      if (v != forbidden) return v;
    }
    return vars_.front() != forbidden ? vars_.front() : vars_.back();
  }

  ExprPtr int_expr(int depth) {
    int top = depth <= 0 ? 1 : 3;
    switch (rng_.range(0, top)) {
      case 0: return make_int(rng_.range(0, 3));
      case 1: return make_var(pick_var());
      case 2: {
        BinOp op = BinOp::Add;
        int hi = cfg_.with_division ? 4 : 2;
        switch (rng_.range(0, hi)) {
          case 0: op = BinOp::Add; break;
          case 1: op = BinOp::Sub; break;
          case 2: op = BinOp::Mul; break;
          case 3: op = BinOp::Div; break;
          case 4: op = BinOp::Mod; break;
        }
        ExprPtr a = int_expr(depth - 1);
        ExprPtr b = int_expr(depth - 1);
        if (op == BinOp::Div || op == BinOp::Mod) {
          // Keep divisors nonzero and positive.
          b = make_bin(BinOp::Add, make_bin(BinOp::Mod, b, make_int(4)), make_int(1));
        }
        return make_bin(op, a, b);
      }
      default:
        return make_un(UnOp::Neg, int_expr(depth - 1));
    }
  }

  ExprPtr bool_expr(int depth) {
    int top = depth <= 0 ? 1 : 3;
    switch (rng_.range(0, top)) {
      case 0: return make_bool(rng_.chance(0.5));
      case 1: {
        BinOp op = BinOp::Lt;
        switch (rng_.range(0, 3)) {
          case 0: op = BinOp::Lt; break;
          case 1: op = BinOp::Le; break;
          case 2: op = BinOp::Eq; break;
          case 3: op = BinOp::Ne; break;
        }
        return make_bin(op, int_expr(depth - 1), int_expr(depth - 1));
      }
      case 2:
        return make_bin(rng_.chance(0.5) ? BinOp::And : BinOp::Or, bool_expr(depth - 1),
                        bool_expr(depth - 1));
      default:
        return make_un(UnOp::Not, bool_expr(depth - 1));
    }
  }

  // Always in [0, mem_size).
  ExprPtr addr_expr() {
    return make_bin(BinOp::Mod, int_expr(cfg_.max_expr_depth), make_int(cfg_.mem_size));
  }

  void cmd(int depth, const std::string& forbidden, Block& out) {
    int roll = static_cast<int>(rng_.range(0, 99));
    if (roll < 30) {
      out.push_back(cmd_assign(pick_var_except(forbidden), int_expr(cfg_.max_expr_depth)));
      return;
    }
    if (roll < 50) {
      out.push_back(cmd_load(pick_var_except(forbidden), addr_expr()));
      return;
    }
    if (roll < 65) {
      out.push_back(cmd_store(addr_expr(), pick_var()));
      return;
    }
    if (roll < 80 && depth > 0) {
      Block then_b = block(depth - 1, static_cast<int>(rng_.range(1, cfg_.max_block_len)),
                           forbidden);
      Block else_b = rng_.chance(0.5)
                         ? Block{}
                         : block(depth - 1, static_cast<int>(rng_.range(1, cfg_.max_block_len)),
                                 forbidden);
      out.push_back(cmd_if(bool_expr(cfg_.max_expr_depth), std::move(then_b), std::move(else_b)));
      return;
    }
    if (roll < 90 && depth > 0) {
      loop(depth, out);
      return;
    }
    if (cfg_.with_msf_ops) {
      switch (rng_.range(0, 2)) {
        case 0: out.push_back(cmd_init_msf()); return;
        case 1: out.push_back(cmd_update_msf(bool_expr(cfg_.max_expr_depth))); return;
        default:
          out.push_back(cmd_protect(pick_var_except(forbidden), int_expr(cfg_.max_expr_depth)));
          return;
      }
    }
    if (cfg_.with_asserts) {
      out.push_back(cmd_assert(bool_expr(cfg_.max_expr_depth)));
      return;
    }
    out.push_back(cmd_assign(pick_var_except(forbidden), int_expr(cfg_.max_expr_depth)));
  }

  void loop(int depth, Block& out) {
    if (source_mode_) {
      // Loop iterations are bounded by the directive budget under the
      // speculative semantics, so any condition terminates.
      out.push_back(cmd_while(bool_expr(cfg_.max_expr_depth),
                              block(depth - 1, static_cast<int>(rng_.range(1, cfg_.max_block_len)),
                                    "")));
      return;
    }
    // Bounded counter shape for sequential runs: i = 0; while (i < k) { ...; i = i + 1; }
    std::string counter = pick_var();
    Int bound = Int(rng_.range(1, cfg_.loop_bound));
    out.push_back(cmd_assign(counter, make_int(0)));
    Block body = block(depth - 1, static_cast<int>(rng_.range(1, cfg_.max_block_len)), counter);
    body.push_back(cmd_assign(counter, make_bin(BinOp::Add, make_var(counter), make_int(1))));
    out.push_back(cmd_while(make_bin(BinOp::Lt, make_var(counter), make_int(bound)),
                            std::move(body)));
  }

  Block program(bool source_mode) {
    source_mode_ = source_mode;
    Block out;
    if (source_mode && cfg_.with_msf_ops) out.push_back(cmd_init_msf());
    Block rest = block(cfg_.max_depth, cfg_.max_block_len, "");
    for (auto& c : rest) out.push_back(std::move(c));
    return out;
  }

  const std::vector<std::string>& vars() const { return vars_; }

private:
  Rng& rng_;
  const ProgGenConfig& cfg_;
  std::vector<std::string> vars_;
  bool source_mode_ = true;
};

}  // namespace

SourceProgram gen_source_program(Rng& rng, const ProgGenConfig& cfg) {
  ProgGenConfig c = cfg;
  c.with_asserts = false;
  Generator g(rng, c);
  SourceProgram p;
  p.cmds = g.program(/*source_mode=*/true);
  return p;
}

TargetProgram gen_target_program(Rng& rng, const ProgGenConfig& cfg) {
  ProgGenConfig c = cfg;
  c.with_msf_ops = false;
  Generator g(rng, c);
  TargetProgram p;
  p.cmds = g.program(/*source_mode=*/false);
  return p;
}

PhiSpec gen_phi(Rng& rng, const std::vector<std::string>& vars, const ProgGenConfig& cfg) {
  PhiSpec phi;
  for (const auto& v : vars) {
    if (rng.chance(0.5)) phi.public_vars.push_back(v);
  }
  Int k = 0;
  switch (rng.range(0, 2)) {
    case 0: k = 0; break;
    case 1: k = floor_div(cfg.mem_size, 2); break;
    default: k = cfg.mem_size; break;
  }
  if (k > 0) phi.public_mem.push_back({Int(0), k});
  return phi;
}

}  // namespace sps
