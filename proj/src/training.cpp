#include "lfact/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace lfact {

unsigned worker_threads() {
  if (const char* env = std::getenv("LFACT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(std::min(v, 64L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::max(1u, std::min(hw, 16u));
}

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::min<std::size_t>(worker_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void adam_update(ParamStore& params, const std::map<std::string, Tensor>& grads,
                 AdamState& state) {
  for (const auto& [name, tensor] : params.tensors)
    if (!grads.count(name))
      throw std::invalid_argument("adam_update: missing gradient for '" + name + "'");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(state.cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(state.cfg.beta2, t);

  for (auto& [name, theta] : params.tensors) {
    const Tensor& g = grads.at(name);
    if (!g.same_shape(theta))
      throw std::invalid_argument("adam_update: gradient shape " + g.shape_str() +
                                  " does not match param '" + name + "' " + theta.shape_str());
    auto m_it = state.m.find(name);
    if (m_it == state.m.end()) {
      m_it = state.m.emplace(name, Tensor::zeros(theta.shape())).first;
      state.v.emplace(name, Tensor::zeros(theta.shape()));
    }
    Tensor& m = m_it->second;
    Tensor& v = state.v.at(name);
    for (std::size_t i = 0; i < theta.numel(); ++i) {
      m[i] = state.cfg.beta1 * m[i] + (1.0 - state.cfg.beta1) * g[i];
      v[i] = state.cfg.beta2 * v[i] + (1.0 - state.cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      theta[i] -= state.cfg.lr * m_hat / (std::sqrt(v_hat) + state.cfg.eps);
    }
  }
}

double clip_global_norm(std::map<std::string, Tensor>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads)
    for (std::size_t i = 0; i < g.numel(); ++i) sq += g[i] * g[i];
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (auto& [name, g] : grads)
      for (std::size_t i = 0; i < g.numel(); ++i) g[i] *= factor;
  }
  return norm;
}

SampleRun run_sample(const ParamStore& params, const ModelSpec& spec, RunMode mode,
                     const Sample& sample, const LossConfig& loss, bool want_grads) {
  Tape tape;
  BoundParams bound = bind(tape, params);
  ModelParams model = bind_model(bound, spec);

  std::vector<Var> inputs;
  inputs.reserve(sample.inputs.size());
  for (const Tensor& x : sample.inputs) inputs.push_back(tape.leaf(x));

  SampleRun out;
  SequenceLoss seq_loss;
  const std::vector<std::vector<int>>* targets = nullptr;
  std::span<const StepOutput> prediction_steps;
  std::vector<StepOutput> all_steps;  // seq2seq: encoder + decoder

  SequenceRun run;
  if (mode == RunMode::rnn) {
    run = run_rnn_mode(tape, model, inputs);
    targets = &sample.targets;
    prediction_steps = run.steps;
    seq_loss = sequence_loss(tape, spec, run.steps, *targets, run.steps, loss.tau, loss.mu,
                             spec.kind == CellKind::lfact);
    for (const StepOutput& s : run.steps)
      if (s.has_record) out.records.push_back(s.record);
  } else {
    if (sample.decoder_targets.empty())
      throw std::invalid_argument("run_sample: sample has no decoder targets for seq2seq mode");
    EncodeResult enc = encode(tape, model, inputs);
    Var dec_input = tape.leaf(sample.decoder_input);
    run = decode(tape, model, enc, dec_input, static_cast<int>(sample.decoder_targets.size()));
    targets = &sample.decoder_targets;
    prediction_steps = run.steps;
    all_steps = enc.steps;
    all_steps.insert(all_steps.end(), run.steps.begin(), run.steps.end());
    // encoder contributes no task loss, only ponder
    seq_loss = sequence_loss(tape, spec, run.steps, *targets, all_steps, loss.tau, loss.mu,
                             /*intermediate_term=*/false);
    for (const StepOutput& s : all_steps)
      if (s.has_record) out.records.push_back(s.record);
  }

  const double steps = static_cast<double>(prediction_steps.size());
  Var normalized = tape.scale(seq_loss.total, 1.0 / steps);
  out.loss = tape.value(normalized)[0];
  out.task = seq_loss.task;
  out.ponder = seq_loss.ponder;

  out.predicted.reserve(prediction_steps.size());
  out.prob_correct.reserve(prediction_steps.size());
  for (std::size_t t = 0; t < prediction_steps.size(); ++t) {
    const StepOutput& step = prediction_steps[t];
    std::vector<int> argmaxes;
    std::vector<double> probs;
    for (std::size_t k = 0; k < step.outputs.size(); ++k) {
      const Tensor& dist = tape.value(step.outputs[k]);
      std::size_t best = 0;
      for (std::size_t c = 1; c < dist.numel(); ++c)
        if (dist[c] > dist[best]) best = c;
      argmaxes.push_back(static_cast<int>(best));
      probs.push_back(dist[static_cast<std::size_t>((*targets)[t][k])]);
    }
    out.predicted.push_back(std::move(argmaxes));
    out.prob_correct.push_back(std::move(probs));
  }

  if (want_grads) {
    auto grad_map = tape.backward(normalized);
    for (const auto& [name, var] : bound.vars) out.grads.emplace(name, grad_map.grad(var));
  }
  return out;
}

std::vector<double> batch_sample_losses(const ParamStore& params, const ModelSpec& spec,
                                        RunMode mode, std::span<const Sample> samples,
                                        const LossConfig& loss, std::size_t batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch_sample_losses: batch_size must be >= 1");
  std::vector<double> losses(samples.size());
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, samples.size());
    parallel_for(end - begin, [&](std::size_t i) {
      losses[begin + i] = run_sample(params, spec, mode, samples[begin + i], loss,
                                     /*want_grads=*/false)
                              .loss;
    });
  }
  return losses;
}

double train_on_batch(ParamStore& params, AdamState& adam, const ModelSpec& spec, RunMode mode,
                      std::span<const Sample* const> batch, const LossConfig& loss) {
  if (batch.empty()) throw std::invalid_argument("train_on_batch: empty batch");
  std::vector<SampleRun> runs(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    runs[i] = run_sample(params, spec, mode, *batch[i], loss, /*want_grads=*/true);
  });

  // deterministic reduction in sample order
  const double inv = 1.0 / static_cast<double>(batch.size());
  std::map<std::string, Tensor> grads;
  double mean_loss = 0.0;
  for (const SampleRun& run : runs) {
    mean_loss += run.loss * inv;
    for (const auto& [name, g] : run.grads) {
      auto it = grads.find(name);
      if (it == grads.end()) {
        it = grads.emplace(name, Tensor::zeros(g.shape())).first;
      }
      Tensor& acc = it->second;
      for (std::size_t i = 0; i < g.numel(); ++i) acc[i] += g[i] * inv;
    }
  }

  clip_global_norm(grads, 1.0);
  adam_update(params, grads, adam);
  return mean_loss;
}

EpochResult train_epoch(ParamStore& params, AdamState& adam, const ModelSpec& spec, RunMode mode,
                        const Dataset& data, std::size_t batch_size, const LossConfig& loss,
                        Rng& order_rng) {
  if (data.samples.empty()) throw std::invalid_argument("train_epoch: empty dataset");
  if (batch_size < 1) throw std::invalid_argument("train_epoch: batch_size must be >= 1");

  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, order_rng);

  EpochResult result;
  double total = 0.0;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, order.size());
    std::vector<const Sample*> batch;
    batch.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) batch.push_back(&data.samples[order[i]]);
    total += train_on_batch(params, adam, spec, mode, batch, loss) *
             static_cast<double>(batch.size());
    result.batches += 1;
  }
  result.mean_loss = total / static_cast<double>(order.size());
  return result;
}

bool lower_is_better(MetricKind kind) { return kind == MetricKind::bpc; }

MetricKind metric_for_task(const std::string& task) {
  return task == "bytes" ? MetricKind::bpc : MetricKind::macro_f1;
}

EvalResult evaluate(const ParamStore& params, const ModelSpec& spec, RunMode mode,
                    const Dataset& data, const LossConfig& loss, MetricKind kind) {
  if (data.samples.empty()) throw std::invalid_argument("evaluate: empty dataset");

  std::vector<SampleRun> runs(data.samples.size());
  parallel_for(data.samples.size(), [&](std::size_t i) {
    runs[i] = run_sample(params, spec, mode, data.samples[i], loss, /*want_grads=*/false);
  });

  EvalResult out;
  out.samples = runs.size();
  out.kind = kind;

  const std::size_t steps = runs[0].predicted.size();
  const std::size_t heads = runs[0].predicted[0].size();

  for (const SampleRun& r : runs) {
    out.mean_loss += r.loss;
    out.task += r.task;
    out.ponder += r.ponder;
  }
  out.mean_loss /= static_cast<double>(runs.size());
  out.task /= static_cast<double>(runs.size());
  out.ponder /= static_cast<double>(runs.size());

  auto targets_of = [&](const Sample& s) -> const std::vector<std::vector<int>>& {
    return mode == RunMode::rnn ? s.targets : s.decoder_targets;
  };

  if (kind == MetricKind::bpc) {
    std::vector<double> all_probs;
    all_probs.reserve(runs.size() * steps * heads);
    for (const SampleRun& r : runs)
      for (const auto& step : r.prob_correct)
        for (double p : step) all_probs.push_back(p);
    out.metric = bpc(all_probs, all_probs.size());

    out.per_step_metric.assign(steps, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      std::vector<double> step_probs;
      step_probs.reserve(runs.size() * heads);
      for (const SampleRun& r : runs)
        for (double p : r.prob_correct[t]) step_probs.push_back(p);
      out.per_step_metric[t] = bpc(step_probs, step_probs.size());
    }
  } else {
    const int n_classes = static_cast<int>(data.info.classes);
    double head_sum = 0.0;
    for (std::size_t k = 0; k < heads; ++k) {
      std::vector<int> preds, truths;
      preds.reserve(runs.size() * steps);
      truths.reserve(runs.size() * steps);
      for (std::size_t s = 0; s < runs.size(); ++s)
        for (std::size_t t = 0; t < steps; ++t) {
          preds.push_back(runs[s].predicted[t][k]);
          truths.push_back(targets_of(data.samples[s])[t][k]);
        }
      head_sum += macro_f1(preds, truths, n_classes);
    }
    out.metric = head_sum / static_cast<double>(heads);

    out.per_step_metric.assign(steps, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      double step_head_sum = 0.0;
      for (std::size_t k = 0; k < heads; ++k) {
        std::vector<int> preds, truths;
        preds.reserve(runs.size());
        truths.reserve(runs.size());
        for (std::size_t s = 0; s < runs.size(); ++s) {
          preds.push_back(runs[s].predicted[t][k]);
          truths.push_back(targets_of(data.samples[s])[t][k]);
        }
        step_head_sum += macro_f1(preds, truths, n_classes);
      }
      out.per_step_metric[t] = step_head_sum / static_cast<double>(heads);
    }
  }

  if (spec.kind != CellKind::rnn && !runs[0].records.empty()) {
    std::vector<std::vector<HaltingRecord>> records;
    records.reserve(runs.size());
    for (SampleRun& r : runs) records.push_back(std::move(r.records));
    out.nt = nt_stats(records, spec.max_layers);
    out.has_nt = true;
  }
  return out;
}

FitResult fit(const ModelSpec& spec, RunMode mode, const Dataset& train, const Dataset& val,
              const FitOptions& options) {
  if (train.samples.empty() || val.samples.empty())
    throw std::invalid_argument("fit: train and val datasets must be non-empty");

  ParamStore params;
  Rng init_rng(options.seed + 1);
  init_model(params, init_rng, spec);

  AdamState adam;
  adam.cfg = options.adam;
  Rng order_rng(options.seed + 2);

  const MetricKind kind = metric_for_task(train.info.task);
  const bool minimize = lower_is_better(kind);

  FitResult result;
  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    EpochResult ep = train_epoch(params, adam, spec, mode, train, options.batch_size,
                                 options.loss, order_rng);
    EvalResult val_eval = evaluate(params, spec, mode, val, options.loss, kind);
    result.log.push_back(EpochLog{epoch, ep.mean_loss, val_eval});

    const bool improved = minimize ? val_eval.metric < best : val_eval.metric > best;
    if (improved || result.log.size() == 1) {
      best = val_eval.metric;
      since_best = 0;
      result.best_epoch = epoch;
      result.best.version = kCheckpointVersion;
      result.best.config_text = options.config_text;
      result.best.params = params;
      result.best.has_optimizer = true;
      result.best.adam = adam;
      result.best.best_metric = val_eval.metric;
    } else {
      ++since_best;
      if (options.patience > 0 && since_best >= options.patience) break;
    }
  }
  return result;
}

}  // namespace lfact
