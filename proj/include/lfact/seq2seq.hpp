#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lfact/lfact_cell.hpp"

namespace lfact {

enum class CellKind { rnn, act, lfact };
enum class RunMode { rnn, seq2seq };

/// Everything needed to build and run one model, independent of data.
struct ModelSpec {
  CellKind kind = CellKind::lfact;
  std::size_t input = 0;
  std::size_t hidden = 0;
  int max_layers = 1;
  double epsilon = 0.01;
  Strategy strategy = Strategy::all;
  Combiner combiner = Combiner::affine;
  HeadDims head;
};

void init_model(ParamStore& store, Rng& rng, const ModelSpec& spec);

struct ModelParams {
  ModelSpec spec;
  GruParams rnn_cell;  // kind == rnn
  HeadParams rnn_head;
  ActParams act;       // kind == act
  LfactParams lfact;   // kind == lfact
};

ModelParams bind_model(const BoundParams& bound, const ModelSpec& spec);

struct StepOutput {
  std::vector<Var> outputs;                     // y_t per head
  std::vector<std::vector<Var>> intermediates;  // lfact: o^n per layer per head
  bool has_record = false;
  HaltingRecord record;
  Var remainder;  // probability var of the final round; valid when has_record
};

struct SequenceRun {
  std::vector<StepOutput> steps;
};

/// Per-step prediction over the whole input sequence.
SequenceRun run_rnn_mode(Tape& tape, const ModelParams& params, std::span<const Var> inputs);

struct EncodeResult {
  Var state;        // rnn / act final state
  StepTrace trace;  // lfact final trace
  std::vector<StepOutput> steps;  // encoder halting records (no task outputs used)
};

/// Runs the cell chain over the encoder inputs. Encoder steps contribute no
/// task loss but their halting records still count toward ponder cost.
EncodeResult encode(Tape& tape, const ModelParams& params, std::span<const Var> inputs);

/// Decoder: every step consumes the same input vector (the last ground truth
/// mapped into input space) and emits a prediction.
SequenceRun decode(Tape& tape, const ModelParams& params, const EncodeResult& enc,
                   Var const_input, int steps);

/// -log of the probability assigned to the target class, mean over heads.
/// A 1e-300 floor keeps the log finite if a probability underflows.
Var step_task_loss(Tape& tape, std::span<const Var> head_probs,
                   std::span<const int> target_classes);

struct SequenceLoss {
  Var total;             // traced total (unnormalized sum over steps)
  double task = 0.0;     // value of the task term
  double ponder = 0.0;   // value of the ponder term (before tau)
};

/// Assembles the training loss: task cross-entropy over prediction steps,
/// plus tau * ponder over ponder_steps (adaptive kinds only), plus the
/// mu-weighted intermediate-output term when requested (lfact, rnn mode).
SequenceLoss sequence_loss(Tape& tape, const ModelSpec& spec,
                           std::span<const StepOutput> prediction_steps,
                           const std::vector<std::vector<int>>& targets,
                           std::span<const StepOutput> ponder_steps, double tau, double mu,
                           bool intermediate_term);

}  // namespace lfact
