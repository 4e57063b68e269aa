#pragma once

#include <map>
#include <span>
#include <vector>

#include "lfact/checkpoint.hpp"
#include "lfact/data.hpp"
#include "lfact/metrics.hpp"
#include "lfact/seq2seq.hpp"

namespace lfact {

/// Bias-corrected Adam step. Every parameter must have a gradient entry;
/// moment tensors are created lazily on first use.
void adam_update(ParamStore& params, const std::map<std::string, Tensor>& grads,
                 AdamState& state);

/// Scales gradients so their global L2 norm is at most max_norm; returns the
/// pre-clip norm.
double clip_global_norm(std::map<std::string, Tensor>& grads, double max_norm);

struct LossConfig {
  double tau = 0.0;
  double mu = 0.0;
};

/// Forward (and optionally backward) of a single sample on its own tape.
struct SampleRun {
  double loss = 0.0;  // total loss normalized by prediction steps
  double task = 0.0;
  double ponder = 0.0;
  std::vector<HaltingRecord> records;              // all steps (encoder first)
  std::vector<std::vector<int>> predicted;         // per prediction step, per head
  std::vector<std::vector<double>> prob_correct;   // per prediction step, per head
  std::map<std::string, Tensor> grads;             // filled when requested
};

SampleRun run_sample(const ParamStore& params, const ModelSpec& spec, RunMode mode,
                     const Sample& sample, const LossConfig& loss, bool want_grads);

/// Per-sample losses at fixed parameters, processed through the training
/// batch path in groups of batch_size. Samples are independent, so the
/// grouping must not change any value.
std::vector<double> batch_sample_losses(const ParamStore& params, const ModelSpec& spec,
                                        RunMode mode, std::span<const Sample> samples,
                                        const LossConfig& loss, std::size_t batch_size);

/// One optimizer step on a batch: mean per-sample gradients, global-norm
/// clip at 1.0, Adam. Returns the mean per-sample loss.
double train_on_batch(ParamStore& params, AdamState& adam, const ModelSpec& spec, RunMode mode,
                      std::span<const Sample* const> batch, const LossConfig& loss);

struct EpochResult {
  double mean_loss = 0.0;
  std::size_t batches = 0;
};

EpochResult train_epoch(ParamStore& params, AdamState& adam, const ModelSpec& spec, RunMode mode,
                        const Dataset& data, std::size_t batch_size, const LossConfig& loss,
                        Rng& order_rng);

enum class MetricKind { bpc, macro_f1 };

struct EvalResult {
  std::size_t samples = 0;
  double mean_loss = 0.0;
  double task = 0.0;
  double ponder = 0.0;
  MetricKind kind = MetricKind::macro_f1;
  double metric = 0.0;
  std::vector<double> per_step_metric;
  bool has_nt = false;
  NtStats nt;
};

bool lower_is_better(MetricKind kind);
MetricKind metric_for_task(const std::string& task);

EvalResult evaluate(const ParamStore& params, const ModelSpec& spec, RunMode mode,
                    const Dataset& data, const LossConfig& loss, MetricKind kind);

struct FitOptions {
  std::size_t batch_size = 8;
  std::size_t epochs = 5;
  std::size_t patience = 0;  // 0 disables early stopping
  LossConfig loss;
  AdamConfig adam;
  std::uint64_t seed = 1;
  std::string config_text;  // echoed into the checkpoint
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  EvalResult val;
};

struct FitResult {
  Checkpoint best;
  std::size_t best_epoch = 0;
  std::vector<EpochLog> log;
};

/// Initializes the model from the seed, trains with per-epoch validation,
/// and keeps the checkpoint with the best validation metric.
FitResult fit(const ModelSpec& spec, RunMode mode, const Dataset& train, const Dataset& val,
              const FitOptions& options);

/// Worker count for per-sample parallelism: LFACT_THREADS when set, else
/// hardware concurrency (capped). Results are reduced in sample order, so
/// the count never changes any value.
unsigned worker_threads();

}  // namespace lfact
