#include "lfact/seq2seq.hpp"

#include <stdexcept>

namespace lfact {

namespace {

constexpr const char* kPrefix = "model";

StepOutput from_act(ActStep&& step) {
  StepOutput out;
  out.outputs = std::move(step.outputs);
  out.record = std::move(step.record);
  out.remainder = step.p.back();
  out.has_record = true;
  return out;
}

StepOutput from_lfact(const StepTrace& trace) {
  StepOutput out;
  out.outputs = trace.deepest();
  out.intermediates = trace.outputs;
  out.record = trace.record;
  out.remainder = trace.p.back();
  out.has_record = true;
  return out;
}

}  // namespace

void init_model(ParamStore& store, Rng& rng, const ModelSpec& spec) {
  HeadDims head = spec.head;
  head.hidden = spec.hidden;
  switch (spec.kind) {
    case CellKind::rnn:
      init_gru(store, rng, std::string(kPrefix) + ".cell", GruDims{spec.input, spec.hidden});
      init_head(store, rng, std::string(kPrefix) + ".head", head);
      break;
    case CellKind::act:
      init_act(store, rng, kPrefix, ActDims{spec.input, spec.hidden, head});
      break;
    case CellKind::lfact: {
      LfactDims dims{spec.input, spec.hidden, spec.max_layers, head, spec.combiner};
      init_lfact(store, rng, kPrefix, dims);
      break;
    }
  }
}

ModelParams bind_model(const BoundParams& bound, const ModelSpec& spec) {
  ModelParams p;
  p.spec = spec;
  HeadDims head = spec.head;
  head.hidden = spec.hidden;
  switch (spec.kind) {
    case CellKind::rnn:
      p.rnn_cell = bind_gru(bound, std::string(kPrefix) + ".cell");
      p.rnn_head = bind_head(bound, std::string(kPrefix) + ".head", head.heads, head.activation);
      break;
    case CellKind::act:
      p.act = bind_act(bound, kPrefix, ActDims{spec.input, spec.hidden, head});
      break;
    case CellKind::lfact: {
      LfactDims dims{spec.input, spec.hidden, spec.max_layers, head, spec.combiner};
      p.lfact = bind_lfact(bound, kPrefix, dims);
      break;
    }
  }
  return p;
}

SequenceRun run_rnn_mode(Tape& tape, const ModelParams& params, std::span<const Var> inputs) {
  if (inputs.empty()) throw std::invalid_argument("run_rnn_mode: no inputs");
  SequenceRun run;
  run.steps.reserve(inputs.size());
  const ModelSpec& spec = params.spec;

  switch (spec.kind) {
    case CellKind::rnn: {
      Var state = tape.leaf(Tensor::zeros({spec.hidden}));
      for (Var x : inputs) {
        state = gru_step(tape, x, state, params.rnn_cell);
        StepOutput step;
        step.outputs = head_forward(tape, state, params.rnn_head);
        run.steps.push_back(std::move(step));
      }
      break;
    }
    case CellKind::act: {
      Var state = tape.leaf(Tensor::zeros({spec.hidden}));
      for (Var x : inputs) {
        ActStep step = act_step(tape, x, state, params.act, spec.epsilon, spec.max_layers);
        state = step.state;
        run.steps.push_back(from_act(std::move(step)));
      }
      break;
    }
    case CellKind::lfact: {
      StepTrace prev = initial_trace(tape, spec.hidden);
      for (Var x : inputs) {
        prev = lfact_step(tape, x, prev, params.lfact, spec.epsilon, spec.max_layers,
                          spec.strategy);
        run.steps.push_back(from_lfact(prev));
      }
      break;
    }
  }
  return run;
}

EncodeResult encode(Tape& tape, const ModelParams& params, std::span<const Var> inputs) {
  if (inputs.empty()) throw std::invalid_argument("encode: no inputs");
  EncodeResult enc;
  const ModelSpec& spec = params.spec;

  switch (spec.kind) {
    case CellKind::rnn: {
      Var state = tape.leaf(Tensor::zeros({spec.hidden}));
      for (Var x : inputs) {
        state = gru_step(tape, x, state, params.rnn_cell);
        enc.steps.emplace_back();
      }
      enc.state = state;
      break;
    }
    case CellKind::act: {
      Var state = tape.leaf(Tensor::zeros({spec.hidden}));
      for (Var x : inputs) {
        ActStep step = act_step(tape, x, state, params.act, spec.epsilon, spec.max_layers);
        state = step.state;
        enc.steps.push_back(from_act(std::move(step)));
      }
      enc.state = state;
      break;
    }
    case CellKind::lfact: {
      StepTrace prev = initial_trace(tape, spec.hidden);
      for (Var x : inputs) {
        prev = lfact_step(tape, x, prev, params.lfact, spec.epsilon, spec.max_layers,
                          spec.strategy);
        enc.steps.push_back(from_lfact(prev));
      }
      enc.trace = prev;
      break;
    }
  }
  return enc;
}

SequenceRun decode(Tape& tape, const ModelParams& params, const EncodeResult& enc,
                   Var const_input, int steps) {
  if (steps < 1) throw std::invalid_argument("decode: steps must be at least 1");
  SequenceRun run;
  run.steps.reserve(static_cast<std::size_t>(steps));
  const ModelSpec& spec = params.spec;

  switch (spec.kind) {
    case CellKind::rnn: {
      Var state = enc.state;
      for (int t = 0; t < steps; ++t) {
        state = gru_step(tape, const_input, state, params.rnn_cell);
        StepOutput step;
        step.outputs = head_forward(tape, state, params.rnn_head);
        run.steps.push_back(std::move(step));
      }
      break;
    }
    case CellKind::act: {
      Var state = enc.state;
      for (int t = 0; t < steps; ++t) {
        ActStep step = act_step(tape, const_input, state, params.act, spec.epsilon,
                                spec.max_layers);
        state = step.state;
        run.steps.push_back(from_act(std::move(step)));
      }
      break;
    }
    case CellKind::lfact: {
      StepTrace prev = enc.trace;
      for (int t = 0; t < steps; ++t) {
        prev = lfact_step(tape, const_input, prev, params.lfact, spec.epsilon, spec.max_layers,
                          spec.strategy);
        run.steps.push_back(from_lfact(prev));
      }
      break;
    }
  }
  return run;
}

Var step_task_loss(Tape& tape, std::span<const Var> head_probs,
                   std::span<const int> target_classes) {
  if (head_probs.size() != target_classes.size())
    throw std::invalid_argument("step_task_loss: " + std::to_string(head_probs.size()) +
                                " heads vs " + std::to_string(target_classes.size()) +
                                " targets");
  Var total;
  for (std::size_t k = 0; k < head_probs.size(); ++k) {
    Var pick = tape.slice(head_probs[k], static_cast<std::size_t>(target_classes[k]), 1);
    Var ce = tape.neg(tape.log(tape.add(pick, tape.scalar(1e-300))));
    total = (k == 0) ? ce : tape.add(total, ce);
  }
  if (head_probs.size() > 1)
    total = tape.scale(total, 1.0 / static_cast<double>(head_probs.size()));
  return total;
}

SequenceLoss sequence_loss(Tape& tape, const ModelSpec& spec,
                           std::span<const StepOutput> prediction_steps,
                           const std::vector<std::vector<int>>& targets,
                           std::span<const StepOutput> ponder_steps, double tau, double mu,
                           bool intermediate_term) {
  if (prediction_steps.size() != targets.size())
    throw std::invalid_argument("sequence_loss: " + std::to_string(prediction_steps.size()) +
                                " steps vs " + std::to_string(targets.size()) + " targets");
  if (tau < 0.0 || mu < 0.0)
    throw std::invalid_argument("sequence_loss: tau and mu must be nonnegative");

  SequenceLoss out;
  Var task;
  for (std::size_t t = 0; t < prediction_steps.size(); ++t) {
    Var step = step_task_loss(tape, prediction_steps[t].outputs, targets[t]);
    task = (t == 0) ? step : tape.add(task, step);
  }
  out.task = tape.value(task)[0];
  Var total = task;

  if (spec.kind != CellKind::rnn) {
    Var ponder;
    bool first = true;
    for (const StepOutput& step : ponder_steps) {
      if (!step.has_record) continue;
      Var term = tape.add(tape.scalar(static_cast<double>(step.record.n_t)), step.remainder);
      ponder = first ? term : tape.add(ponder, term);
      first = false;
    }
    if (!first) {
      out.ponder = tape.value(ponder)[0];
      if (tau != 0.0) total = tape.add(total, tape.scale(ponder, tau));
    }
  }

  if (intermediate_term && spec.kind == CellKind::lfact && mu != 0.0) {
    Var extra;
    bool first = true;
    for (std::size_t t = 0; t < prediction_steps.size(); ++t) {
      for (const auto& layer_outputs : prediction_steps[t].intermediates) {
        Var step = step_task_loss(tape, layer_outputs, targets[t]);
        extra = first ? step : tape.add(extra, step);
        first = false;
      }
    }
    if (!first) total = tape.add(total, tape.scale(extra, mu));
  }

  out.total = total;
  return out;
}

}  // namespace lfact
