#pragma once

#include <span>
#include <vector>

#include "lfact/act.hpp"

namespace lfact {

/// Transmission strategies: LTD restricts the attention keys to the layers
/// at or below the requesting one, ALL uses every primary state of the
/// previous step.
enum class Strategy { ltd, all };

enum class Combiner { affine, mlp };

struct LfactDims {
  std::size_t input = 0;
  std::size_t hidden = 0;
  int max_layers = 1;
  HeadDims head;
  Combiner combiner = Combiner::affine;
};

void init_lfact(ParamStore& store, Rng& rng, const std::string& prefix, LfactDims dims);

struct CombinerParams {
  Combiner kind = Combiner::affine;
  Var w1, w2, b;  // two-input affine (first mlp layer uses the same weights)
  Var wo, bo;     // mlp output layer
};

/// g(transmission, prev_output): affine is sigmoid(W1 x + W2 y + b); mlp is
/// a depth-2 stack, tanh hidden and sigmoid final.
Var combine_g(Tape& tape, Var transmission, Var prev_output, const CombinerParams& p);

struct AttentionParams {
  Var w_q, v_q, b_q;  // H x H, H x H, H
  Var v_rows;         // L x H, one scoring row per layer index
  int max_layers = 1;
};

/// Attention over the previous step's primary states: scores
/// beta_i = V_n . sigmoid(W_q q + V_q u_i + b_q) over the first c states,
/// c = min(N, layer_n) for LTD and c = N for ALL; returns sum(alpha_i u_i)
/// with alpha = softmax(beta). alpha_out, when given, receives the weights.
Var transmission_state(Tape& tape, std::span<const Var> primaries, Var query, int layer_n,
                       Strategy strategy, const AttentionParams& p, Var* alpha_out = nullptr);

struct LfactParams {
  GruParams cell;
  HeadParams head;
  CombinerParams g;
  AttentionParams attn;
  Var w_h, v_h, b_h;  // halting: 1 x H, 1 x H, [1]
};

LfactParams bind_lfact(const BoundParams& bound, const std::string& prefix,
                       const LfactDims& dims);

/// Per-step state of the layer-flexible cell.
struct StepTrace {
  std::vector<Var> primaries;                  // u^1..u^{n_t}
  std::vector<std::vector<Var>> outputs;       // o^n per layer, per head
  HaltingRecord record;
  std::vector<Var> transmission_used;          // the u_bar consumed per layer
  std::vector<Var> p;                          // probability vars; p.back() = remainder
  std::vector<Var> deepest() const { return outputs.back(); }  // y_t
};

/// Boundary trace for t = 1: a single zero primary state (attention over it
/// yields a zero transmission state, so no further special-casing).
StepTrace initial_trace(Tape& tape, std::size_t hidden);

/// One step: layer n queries with the freshest primary available (previous
/// layer's state, or the previous step's deepest for n == 1), attends over
/// the previous step's primaries, combines through g, then runs the cell on
/// the raw input. Halting reads both the layer state and its transmission
/// state; the step output is the deepest layer's output.
StepTrace lfact_step(Tape& tape, Var x, const StepTrace& prev, const LfactParams& params,
                     double epsilon, int max_layers, Strategy strategy);

std::vector<StepTrace> run_sequence(Tape& tape, std::span<const Var> inputs,
                                    const LfactParams& params, double epsilon, int max_layers,
                                    Strategy strategy);

/// Loss with intermediate supervision: act_loss plus
/// mu * sum over steps and layers of the per-layer task losses.
double lfact_loss(double task_loss, const std::vector<std::vector<double>>& intermediate_losses,
                  std::span<const HaltingRecord> records, double tau, double mu);

}  // namespace lfact
