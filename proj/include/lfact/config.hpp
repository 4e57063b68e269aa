#pragma once

#include <cstdint>
#include <string>

#include "lfact/seq2seq.hpp"

namespace lfact {

/// Complete experiment description. Parsed from flat dotted-key = value
/// text (UTF-8, '#' comments); unknown keys are rejected, absent keys take
/// the defaults below (some depend on data.task).
struct RunConfig {
  CellKind model_kind = CellKind::lfact;
  std::size_t hidden = 128;
  int max_layers = 0;        // task default: market 5, bytes 3, modsum 3
  double epsilon = 0.01;
  Strategy strategy = Strategy::all;
  Combiner combiner = Combiner::affine;
  RunMode mode = RunMode::rnn;
  std::size_t decoder_len = 10;
  double tau = -1.0;         // task default: market 0.001, bytes 0.06, modsum 0.01
  double mu = 0.1;
  double lr = 0.0005;
  std::size_t batch = 8;
  std::string task = "modsum";
  std::string data_path;
  std::size_t seq_len = 0;   // task default: bytes 50, market 20, modsum 20
  std::size_t train_count = 0;  // task default below
  std::size_t val_count = 0;
  std::size_t test_count = 0;
  std::size_t epochs = 5;
  std::size_t patience = 0;
  std::uint64_t seed = 1;

  /// Canonical dotted-key serialization (the form echoed into checkpoints).
  std::string to_text() const;

  ModelSpec model_spec(std::size_t input_dim, std::size_t heads, std::size_t classes) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

const char* cell_kind_name(CellKind kind);
const char* strategy_name(Strategy s);
const char* combiner_name(Combiner c);
const char* run_mode_name(RunMode m);

}  // namespace lfact
