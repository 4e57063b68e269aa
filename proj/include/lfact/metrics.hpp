#pragma once

#include <span>
#include <string>
#include <vector>

#include "lfact/act.hpp"

namespace lfact {

/// Bits per character: mean over all predicted characters of -log2 p, with
/// probabilities floored at 1e-12. total_chars is the number of predictions
/// the probabilities cover.
double bpc(std::span<const double> probs_of_correct, std::size_t total_chars);

/// Unweighted mean over classes of per-class F1 = 2PR/(P+R). A class with
/// no truths and no predictions contributes 0.
double macro_f1(std::span<const int> predictions, std::span<const int> truths, int n_classes);

struct NtStats {
  std::vector<double> mean_per_step;
  std::vector<int> max_per_step;
  int max_overall = 0;
  double multi_round_fraction = 0.0;           // sequences with any n_t > 1
  std::vector<std::vector<std::size_t>> histogram;  // [step][n_t - 1], n_t in 1..L
};

/// records[sample][step]; every sample must cover the same number of steps.
NtStats nt_stats(const std::vector<std::vector<HaltingRecord>>& records, int max_layers);

/// (metric - baseline) / baseline, sign-flipped for lower-is-better metrics
/// so that positive always means improvement.
double relative_improvement(double metric, double baseline, bool lower_is_better = false);

struct MetricReport {
  int epoch = -1;
  std::string split;
  std::string model;
  std::string metric_name;  // "bpc" or "macro_f1"
  double metric = 0.0;
  double loss = 0.0;
  double task_loss = 0.0;
  double ponder = 0.0;
  std::size_t samples = 0;
  std::vector<double> per_step_metric;
  std::vector<double> mean_nt_per_step;
  int max_nt = 0;
  double multi_round_fraction = 0.0;
};

/// Single-line JSON document (schema: {epoch, split, model, metrics{...},
/// per_step{...}}); byte-stable for identical inputs.
std::string report_json(const MetricReport& report);

/// Two-column CSV, header "step,value".
void write_series_csv(const std::string& path, std::span<const double> values);

/// N_t distribution CSV: step, mean_nt, max_nt, count_1..count_L.
void write_nt_distribution_csv(const std::string& path, const NtStats& stats, int max_layers);

}  // namespace lfact
