#include "lfact/data.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace lfact {

namespace {

Tensor one_hot(std::size_t index, std::size_t width) {
  Tensor t({width});
  t[index] = 1.0;
  return t;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

std::array<Dataset, 3> load_byte_corpus(const std::string& path, std::size_t seq_len,
                                        const SplitCounts& counts, Rng& rng,
                                        std::size_t decoder_len) {
  if (seq_len < 1) throw std::invalid_argument("load_byte_corpus: seq_len must be positive");
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  const std::size_t window = seq_len + decoder_len + 1;
  const std::size_t needed = counts.train + counts.val + counts.test;
  const std::size_t available = bytes.size() / window;
  if (available < needed)
    throw std::runtime_error("corpus too small: " + std::to_string(bytes.size()) +
                             " bytes, need at least " + std::to_string(window * needed) +
                             " for " + std::to_string(needed) + " disjoint windows of " +
                             std::to_string(window) + " bytes");

  std::vector<std::size_t> windows(available);
  std::iota(windows.begin(), windows.end(), 0);
  shuffle(windows, rng);

  const char* split_names[3] = {"train", "val", "test"};
  const std::size_t split_sizes[3] = {counts.train, counts.val, counts.test};
  std::array<Dataset, 3> out;
  std::size_t cursor = 0;
  for (int s = 0; s < 3; ++s) {
    Dataset& ds = out[static_cast<std::size_t>(s)];
    ds.info = DatasetInfo{"bytes", 256, 1, 256, split_names[s]};
    ds.samples.reserve(split_sizes[s]);
    for (std::size_t i = 0; i < split_sizes[s]; ++i) {
      const std::size_t base = windows[cursor++] * window;
      Sample sample;
      for (std::size_t t = 0; t < seq_len; ++t) {
        sample.inputs.push_back(one_hot(bytes[base + t], 256));
        sample.targets.push_back({static_cast<int>(bytes[base + t + 1])});
      }
      if (decoder_len > 0) {
        sample.decoder_input = one_hot(bytes[base + seq_len], 256);
        for (std::size_t t = 0; t < decoder_len; ++t)
          sample.decoder_targets.push_back({static_cast<int>(bytes[base + seq_len + 1 + t])});
      }
      ds.samples.push_back(std::move(sample));
    }
  }
  return out;
}

Dataset gen_modsum(Rng& rng, std::size_t n_samples, std::size_t seq_len,
                   std::size_t decoder_len) {
  if (seq_len < 5) throw std::invalid_argument("gen_modsum: seq_len must be at least 5");
  Dataset ds;
  ds.info = DatasetInfo{"modsum", 11, 1, 10, ""};

  const std::size_t total_len = seq_len + decoder_len + (decoder_len > 0 ? 1 : 0);
  const int difficulty_values[3] = {1, 3, 5};
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::vector<int> digits(total_len);
    std::vector<int> difficulty(total_len);
    for (std::size_t t = 0; t < total_len; ++t) {
      digits[t] = static_cast<int>(rng.next_below(10));
      if (t % 5 == 0) {
        const int d = difficulty_values[rng.next_below(3)];
        for (std::size_t j = t; j < std::min(t + 5, total_len); ++j) difficulty[j] = d;
      }
    }
    auto target_at = [&](std::size_t t) {
      const std::size_t span = static_cast<std::size_t>(difficulty[t]);
      const std::size_t first = (t + 1 >= span) ? t + 1 - span : 0;
      int acc = 0;
      for (std::size_t j = first; j <= t; ++j) acc += digits[j];
      return acc % 10;
    };
    auto input_at = [&](std::size_t t) {
      Tensor x({11});
      x[static_cast<std::size_t>(digits[t])] = 1.0;
      x[10] = static_cast<double>(difficulty[t]);
      return x;
    };

    Sample sample;
    for (std::size_t t = 0; t < seq_len; ++t) {
      sample.inputs.push_back(input_at(t));
      sample.targets.push_back({target_at(t)});
    }
    if (decoder_len > 0) {
      sample.decoder_input = input_at(seq_len);
      for (std::size_t t = 0; t < decoder_len; ++t)
        sample.decoder_targets.push_back({target_at(seq_len + t)});
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

int sigma_bucket(double z) {
  if (z <= -2.0) return 0;
  if (z <= -1.0) return 1;
  if (z <= 1.0) return 2;
  if (z <= 2.0) return 3;
  return 4;
}

Dataset gen_market_surrogate(Rng& rng, std::size_t n_samples, std::size_t seq_len,
                             std::size_t channels, std::size_t decoder_len) {
  if (channels < 1) throw std::invalid_argument("gen_market_surrogate: channels must be >= 1");
  Dataset ds;
  ds.info = DatasetInfo{"market", channels, channels, 5, ""};

  const double phi = 0.3;
  // stationary std of r' = phi r + N(0,1)
  const double sigma = 1.0 / std::sqrt(1.0 - phi * phi);
  const std::size_t total_len = seq_len + decoder_len + 1;  // +1 for next-step labels

  for (std::size_t s = 0; s < n_samples; ++s) {
    // returns[t][c]
    std::vector<std::vector<double>> returns(total_len, std::vector<double>(channels));
    for (std::size_t c = 0; c < channels; ++c) {
      double r = 0.0;
      for (std::size_t t = 0; t < total_len; ++t) {
        r = phi * r + rng.normal();
        returns[t][c] = r;
      }
    }
    auto labels_at = [&](std::size_t t) {
      std::vector<int> classes(channels);
      for (std::size_t c = 0; c < channels; ++c)
        classes[c] = sigma_bucket(returns[t + 1][c] / sigma);
      return classes;
    };

    Sample sample;
    for (std::size_t t = 0; t < seq_len; ++t) {
      sample.inputs.emplace_back(std::vector<std::size_t>{channels},
                                 std::vector<double>(returns[t]));
      sample.targets.push_back(labels_at(t));
    }
    if (decoder_len > 0) {
      sample.decoder_input =
          Tensor({channels}, std::vector<double>(returns[seq_len]));
      for (std::size_t t = 0; t < decoder_len; ++t)
        sample.decoder_targets.push_back(labels_at(seq_len + t));
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

double modsum_difficulty(const Tensor& input) { return input[input.numel() - 1]; }

namespace {

void write_int_row(std::ofstream& out, const std::vector<int>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
}

}  // namespace

void export_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);

  if (ds.info.task == "market") {
    // one line per (sample, step): idx, step, one column per input channel,
    // then the per-head classes comma-separated
    for (std::size_t s = 0; s < ds.samples.size(); ++s) {
      const Sample& sample = ds.samples[s];
      for (std::size_t t = 0; t < sample.inputs.size(); ++t) {
        out << s << "\t" << (t + 1);
        for (std::size_t c = 0; c < sample.inputs[t].numel(); ++c)
          out << "\t" << sample.inputs[t][c];
        out << "\t";
        write_int_row(out, sample.targets[t]);
        out << "\n";
      }
    }
    return;
  }

  // one line per sample: idx, input class sequence, (difficulty sequence,)
  // target sequence
  for (std::size_t s = 0; s < ds.samples.size(); ++s) {
    const Sample& sample = ds.samples[s];
    out << s << "\t";
    std::vector<int> symbols;
    for (const Tensor& x : sample.inputs) {
      // leading channels are one-hot
      const std::size_t vocab = (ds.info.task == "modsum") ? 10 : x.numel();
      int sym = 0;
      for (std::size_t c = 0; c < vocab; ++c)
        if (x[c] == 1.0) sym = static_cast<int>(c);
      symbols.push_back(sym);
    }
    write_int_row(out, symbols);
    if (ds.info.task == "modsum") {
      out << "\t";
      std::vector<int> diffs;
      for (const Tensor& x : sample.inputs)
        diffs.push_back(static_cast<int>(modsum_difficulty(x)));
      write_int_row(out, diffs);
    }
    out << "\t";
    std::vector<int> targets;
    for (const auto& step : sample.targets) targets.push_back(step[0]);
    write_int_row(out, targets);
    out << "\n";
  }
}

}  // namespace lfact
