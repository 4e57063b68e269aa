#include "lfact/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lfact {

double bpc(std::span<const double> probs_of_correct, std::size_t total_chars) {
  if (total_chars == 0) throw std::invalid_argument("bpc: total_chars must be positive");
  double bits = 0.0;
  for (double p : probs_of_correct) {
    const double clamped = std::max(p, 1e-12);
    bits -= std::log2(clamped);
  }
  return bits / static_cast<double>(total_chars);
}

double macro_f1(std::span<const int> predictions, std::span<const int> truths, int n_classes) {
  if (predictions.size() != truths.size())
    throw std::invalid_argument("macro_f1: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(truths.size()) + " truths");
  if (n_classes < 1) throw std::invalid_argument("macro_f1: n_classes must be positive");

  std::vector<std::size_t> tp(n_classes, 0), pred_count(n_classes, 0), truth_count(n_classes, 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int t = truths[i];
    if (p < 0 || p >= n_classes || t < 0 || t >= n_classes)
      throw std::invalid_argument("macro_f1: class index out of range at " + std::to_string(i));
    ++pred_count[p];
    ++truth_count[t];
    if (p == t) ++tp[p];
  }

  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    const double denom = static_cast<double>(pred_count[c] + truth_count[c]);
    // 2PR/(P+R) == 2*tp / (pred + truth); empty class -> 0
    total += denom > 0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
  }
  return total / static_cast<double>(n_classes);
}

NtStats nt_stats(const std::vector<std::vector<HaltingRecord>>& records, int max_layers) {
  if (records.empty() || records[0].empty())
    throw std::invalid_argument("nt_stats: no records");
  const std::size_t steps = records[0].size();
  for (const auto& sample : records)
    if (sample.size() != steps)
      throw std::invalid_argument("nt_stats: ragged step counts across samples");

  NtStats stats;
  stats.mean_per_step.assign(steps, 0.0);
  stats.max_per_step.assign(steps, 0);
  stats.histogram.assign(steps, std::vector<std::size_t>(static_cast<std::size_t>(max_layers), 0));

  std::size_t multi = 0;
  for (const auto& sample : records) {
    bool any_multi = false;
    for (std::size_t t = 0; t < steps; ++t) {
      const int n = sample[t].n_t;
      if (n < 1 || n > max_layers)
        throw std::invalid_argument("nt_stats: n_t = " + std::to_string(n) + " outside 1.." +
                                    std::to_string(max_layers));
      stats.mean_per_step[t] += static_cast<double>(n);
      stats.max_per_step[t] = std::max(stats.max_per_step[t], n);
      stats.histogram[t][static_cast<std::size_t>(n - 1)] += 1;
      if (n > 1) any_multi = true;
    }
    if (any_multi) ++multi;
  }
  for (double& m : stats.mean_per_step) m /= static_cast<double>(records.size());
  stats.max_overall = *std::max_element(stats.max_per_step.begin(), stats.max_per_step.end());
  stats.multi_round_fraction = static_cast<double>(multi) / static_cast<double>(records.size());
  return stats;
}

double relative_improvement(double metric, double baseline, bool lower_is_better) {
  if (baseline == 0.0) throw std::invalid_argument("relative_improvement: zero baseline");
  const double change = (metric - baseline) / baseline;
  return lower_is_better ? -change : change;
}

std::string report_json(const MetricReport& report) {
  nlohmann::json metrics{
      {report.metric_name, report.metric}, {"loss", report.loss},
      {"task_loss", report.task_loss},     {"ponder", report.ponder},
      {"samples", report.samples},
  };
  if (report.max_nt > 0) {
    metrics["max_nt"] = report.max_nt;
    metrics["multi_round_fraction"] = report.multi_round_fraction;
  }
  nlohmann::json per_step;
  if (!report.per_step_metric.empty()) per_step["metric"] = report.per_step_metric;
  if (!report.mean_nt_per_step.empty()) per_step["mean_nt"] = report.mean_nt_per_step;

  nlohmann::json doc{
      {"epoch", report.epoch}, {"split", report.split},     {"model", report.model},
      {"metrics", metrics},    {"per_step", per_step},
  };
  return doc.dump();
}

void write_series_csv(const std::string& path, std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << (i + 1) << "," << values[i] << "\n";
}

void write_nt_distribution_csv(const std::string& path, const NtStats& stats, int max_layers) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step,mean_nt,max_nt";
  for (int level = 1; level <= max_layers; ++level) out << ",count_" << level;
  out << "\n";
  out.precision(17);
  for (std::size_t t = 0; t < stats.mean_per_step.size(); ++t) {
    out << (t + 1) << "," << stats.mean_per_step[t] << "," << stats.max_per_step[t];
    for (std::size_t level = 0; level < static_cast<std::size_t>(max_layers); ++level)
      out << "," << stats.histogram[t][level];
    out << "\n";
  }
}

}  // namespace lfact
