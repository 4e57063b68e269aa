#include "lfact/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lfact {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "': " + why);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) bad(key, "expected a number, got '" + value + "'");
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    bad(key, "expected a nonnegative integer, got '" + value + "'");
  }
  if (used != value.size()) bad(key, "expected a nonnegative integer, got '" + value + "'");
  return v;
}

}  // namespace

const char* cell_kind_name(CellKind kind) {
  switch (kind) {
    case CellKind::rnn: return "rnn";
    case CellKind::act: return "act";
    case CellKind::lfact: return "lfact";
  }
  return "?";
}

const char* strategy_name(Strategy s) { return s == Strategy::ltd ? "ltd" : "all"; }
const char* combiner_name(Combiner c) { return c == Combiner::affine ? "affine" : "mlp"; }
const char* run_mode_name(RunMode m) { return m == RunMode::rnn ? "rnn" : "seq2seq"; }

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  cfg.max_layers = -1;
  cfg.tau = -1.0;
  cfg.seq_len = 0;
  cfg.train_count = 0;
  cfg.val_count = 0;
  cfg.test_count = 0;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "model.kind") {
      if (value == "rnn") cfg.model_kind = CellKind::rnn;
      else if (value == "act") cfg.model_kind = CellKind::act;
      else if (value == "lfact") cfg.model_kind = CellKind::lfact;
      else bad(key, "expected rnn|act|lfact, got '" + value + "'");
    } else if (key == "model.hidden") {
      cfg.hidden = parse_count(key, value);
      if (cfg.hidden < 1) bad(key, "must be at least 1");
    } else if (key == "model.max_layers") {
      cfg.max_layers = static_cast<int>(parse_count(key, value));
      if (cfg.max_layers < 1) bad(key, "must be at least 1");
    } else if (key == "model.epsilon") {
      cfg.epsilon = parse_double(key, value);
      if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) bad(key, "must lie in (0, 1)");
    } else if (key == "model.strategy") {
      if (value == "ltd") cfg.strategy = Strategy::ltd;
      else if (value == "all") cfg.strategy = Strategy::all;
      else bad(key, "expected ltd|all, got '" + value + "'");
    } else if (key == "model.combiner") {
      if (value == "affine") cfg.combiner = Combiner::affine;
      else if (value == "mlp") cfg.combiner = Combiner::mlp;
      else bad(key, "expected affine|mlp, got '" + value + "'");
    } else if (key == "mode") {
      if (value == "rnn") cfg.mode = RunMode::rnn;
      else if (value == "seq2seq") cfg.mode = RunMode::seq2seq;
      else bad(key, "expected rnn|seq2seq, got '" + value + "'");
    } else if (key == "seq2seq.decoder_len") {
      cfg.decoder_len = parse_count(key, value);
      if (cfg.decoder_len < 1) bad(key, "must be at least 1");
    } else if (key == "loss.tau") {
      cfg.tau = parse_double(key, value);
      if (cfg.tau < 0.0) bad(key, "must be nonnegative");
    } else if (key == "loss.mu") {
      cfg.mu = parse_double(key, value);
      if (cfg.mu < 0.0) bad(key, "must be nonnegative");
    } else if (key == "optim.lr") {
      cfg.lr = parse_double(key, value);
      if (!(cfg.lr > 0.0)) bad(key, "must be positive");
    } else if (key == "optim.batch") {
      cfg.batch = parse_count(key, value);
      if (cfg.batch < 1) bad(key, "must be at least 1");
    } else if (key == "data.task") {
      if (value != "bytes" && value != "modsum" && value != "market")
        bad(key, "expected bytes|modsum|market, got '" + value + "'");
      cfg.task = value;
    } else if (key == "data.path") {
      cfg.data_path = value;
    } else if (key == "data.seq_len") {
      cfg.seq_len = parse_count(key, value);
      if (cfg.seq_len < 1) bad(key, "must be at least 1");
    } else if (key == "data.train_count") {
      cfg.train_count = parse_count(key, value);
    } else if (key == "data.val_count") {
      cfg.val_count = parse_count(key, value);
    } else if (key == "data.test_count") {
      cfg.test_count = parse_count(key, value);
    } else if (key == "train.epochs") {
      cfg.epochs = parse_count(key, value);
      if (cfg.epochs < 1) bad(key, "must be at least 1");
    } else if (key == "train.patience") {
      cfg.patience = parse_count(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_count(key, value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

  // task-dependent defaults
  const bool bytes = cfg.task == "bytes";
  const bool market = cfg.task == "market";
  if (cfg.max_layers < 1) cfg.max_layers = market ? 5 : 3;
  if (cfg.tau < 0.0) cfg.tau = bytes ? 0.06 : (market ? 0.001 : 0.01);
  if (cfg.seq_len == 0) cfg.seq_len = bytes ? 50 : 20;
  if (cfg.train_count == 0) cfg.train_count = bytes ? 10240 : 2000;
  if (cfg.val_count == 0) cfg.val_count = bytes ? 1280 : 500;
  if (cfg.test_count == 0) cfg.test_count = bytes ? 1280 : 500;
  if (bytes && cfg.data_path.empty())
    throw std::invalid_argument("config: data.path is required for data.task = bytes");
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "model.kind = " << cell_kind_name(model_kind) << "\n";
  out << "model.hidden = " << hidden << "\n";
  out << "model.max_layers = " << max_layers << "\n";
  out << "model.epsilon = " << epsilon << "\n";
  out << "model.strategy = " << strategy_name(strategy) << "\n";
  out << "model.combiner = " << combiner_name(combiner) << "\n";
  out << "mode = " << run_mode_name(mode) << "\n";
  out << "seq2seq.decoder_len = " << decoder_len << "\n";
  out << "loss.tau = " << tau << "\n";
  out << "loss.mu = " << mu << "\n";
  out << "optim.lr = " << lr << "\n";
  out << "optim.batch = " << batch << "\n";
  out << "data.task = " << task << "\n";
  out << "data.path = " << data_path << "\n";
  out << "data.seq_len = " << seq_len << "\n";
  out << "data.train_count = " << train_count << "\n";
  out << "data.val_count = " << val_count << "\n";
  out << "data.test_count = " << test_count << "\n";
  out << "train.epochs = " << epochs << "\n";
  out << "train.patience = " << patience << "\n";
  out << "seed = " << seed << "\n";
  return out.str();
}

ModelSpec RunConfig::model_spec(std::size_t input_dim, std::size_t heads,
                                std::size_t classes) const {
  ModelSpec spec;
  spec.kind = model_kind;
  spec.input = input_dim;
  spec.hidden = hidden;
  spec.max_layers = max_layers;
  spec.epsilon = epsilon;
  spec.strategy = strategy;
  spec.combiner = combiner;
  spec.head = HeadDims{hidden, classes, heads, HeadActivation::softmax};
  return spec;
}

}  // namespace lfact
