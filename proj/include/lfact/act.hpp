#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lfact/cells.hpp"

namespace lfact {

/// Per-step halting trace. Invariants:
///   1 <= n_t <= L; len(h_values) == len(p) == n_t;
///   p_i == h_i for i < n_t; p[n_t-1] == remainder == 1 - sum(h_i, i < n_t);
///   sum(h_i, i < n_t) < 1 - eps, hence remainder > eps;
///   sum over i <= n_t of h_i >= 1 - eps, or n_t == L.
struct HaltingRecord {
  std::vector<double> h_values;
  int n_t = 0;
  std::vector<double> p;
  double remainder = 0.0;
};

/// Pulls halting unit values one round at a time (h_stream(round), 1-based)
/// until the accumulated value reaches 1 - epsilon or the round cap L.
/// Each h must lie in the open interval (0, 1).
HaltingRecord halt_schedule(const std::function<double(int)>& h_stream, double epsilon,
                            int max_layers);

struct ActDims {
  std::size_t input = 0;  // raw input width; the cell itself sees input+1 (flag)
  std::size_t hidden = 0;
  HeadDims head;
};

void init_act(ParamStore& store, Rng& rng, const std::string& prefix, ActDims dims);

struct ActParams {
  GruParams cell;
  HeadParams head;
  Var w_h;  // 1 x H
  Var b_h;  // [1]
};

ActParams bind_act(const BoundParams& bound, const std::string& prefix, const ActDims& dims);

struct ActStep {
  Var state;                 // mean-field u_t
  std::vector<Var> outputs;  // mean-field y_t per head
  HaltingRecord record;
  std::vector<Var> p;  // per-round probability vars; p.back() is the remainder
};

/// One adaptive step: round n feeds augment_flag(x, n==1); round 1 consumes
/// u_prev, later rounds consume the previous round's state. The mean-field
/// state/output are probability-weighted sums over rounds, differentiable
/// through p; the round count itself is treated as a constant.
ActStep act_step(Tape& tape, Var x, Var u_prev, const ActParams& params, double epsilon,
                 int max_layers);

/// Builds the per-round probability vars for a halting pattern: h_i below
/// the halting round, then the remainder 1 - sum of those h. Shared by the
/// adaptive cells so their p arithmetic is identical.
std::vector<Var> halting_probability_vars(Tape& tape, std::span<const Var> h_vars, int n_t);

/// Clamps a halting unit value into the open unit interval; fp64 sigmoid
/// saturates to exact 0/1 for |x| beyond ~37 and the schedule rejects those.
double clamp_open_unit(double v);

/// Total computation time over a sequence: sum of (n_t + remainder_t).
double ponder_cost(std::span<const HaltingRecord> records);

/// Task loss plus tau * ponder_cost.
double act_loss(double task_loss, std::span<const HaltingRecord> records, double tau);

}  // namespace lfact
