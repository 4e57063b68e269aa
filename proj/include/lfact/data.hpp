#pragma once

#include <array>
#include <string>
#include <vector>

#include "lfact/rng.hpp"
#include "lfact/tensor.hpp"

namespace lfact {

struct Sample {
  std::vector<Tensor> inputs;              // one rank-1 tensor per step
  std::vector<std::vector<int>> targets;   // per step, per head class index
  Tensor decoder_input;                    // constant decoder input (seq2seq)
  std::vector<std::vector<int>> decoder_targets;
};

struct DatasetInfo {
  std::string task;
  std::size_t input_dim = 0;
  std::size_t heads = 1;
  std::size_t classes = 0;
  std::string split;
};

struct Dataset {
  DatasetInfo info;
  std::vector<Sample> samples;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// Non-overlapping random windows of seq_len+1 bytes (seq_len+decoder_len+1
/// when decoder_len > 0), one-hot 256 inputs, next byte as the target.
/// Splits draw from disjoint window sets; rejects files too small to supply
/// them. Returns {train, val, test}.
std::array<Dataset, 3> load_byte_corpus(const std::string& path, std::size_t seq_len,
                                        const SplitCounts& counts, Rng& rng,
                                        std::size_t decoder_len = 0);

/// Synthetic difficulty-structured task: inputs are a one-hot digit 0-9 plus
/// a difficulty channel d in {1,3,5}, piecewise-constant over segments of 5
/// steps; the target is the last d digits summed mod 10.
Dataset gen_modsum(Rng& rng, std::size_t n_samples, std::size_t seq_len,
                   std::size_t decoder_len = 0);

/// Market surrogate: 22 AR(1) return channels (r' = 0.3 r + N(0,1)); each
/// head classifies the next step's standardized return into 5 sigma buckets
/// with boundaries (-2, -1, 1, 2).
Dataset gen_market_surrogate(Rng& rng, std::size_t n_samples, std::size_t seq_len,
                             std::size_t channels = 22, std::size_t decoder_len = 0);

/// Bucket index for a standardized return; exposed for tests.
int sigma_bucket(double z);

/// Difficulty channel value at a step of a modsum input (the last channel).
double modsum_difficulty(const Tensor& input);

/// Tab-separated inspection dump; format depends on the task (documented in
/// the README).
void export_dataset(const Dataset& ds, const std::string& path);

}  // namespace lfact
