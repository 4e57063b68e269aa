#include "lfact/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfact/model_check.hpp"

namespace lfact {

namespace fs = std::filesystem;

DataBundle build_datasets(const RunConfig& cfg) {
  Rng rng(cfg.seed);
  const std::size_t decoder_len = cfg.mode == RunMode::seq2seq ? cfg.decoder_len : 0;

  DataBundle bundle;
  if (cfg.task == "bytes") {
    auto splits = load_byte_corpus(cfg.data_path, cfg.seq_len,
                                   SplitCounts{cfg.train_count, cfg.val_count, cfg.test_count},
                                   rng, decoder_len);
    bundle.train = std::move(splits[0]);
    bundle.val = std::move(splits[1]);
    bundle.test = std::move(splits[2]);
  } else {
    auto generate = [&](std::size_t n, const char* split) {
      Dataset ds = cfg.task == "modsum"
                       ? gen_modsum(rng, n, cfg.seq_len, decoder_len)
                       : gen_market_surrogate(rng, n, cfg.seq_len, 22, decoder_len);
      ds.info.split = split;
      return ds;
    };
    bundle.train = generate(cfg.train_count, "train");
    bundle.val = generate(cfg.val_count, "val");
    bundle.test = generate(cfg.test_count, "test");
  }
  return bundle;
}

namespace {

NtStats all_ones_stats(std::size_t steps, std::size_t samples) {
  NtStats stats;
  stats.mean_per_step.assign(steps, 1.0);
  stats.max_per_step.assign(steps, 1);
  stats.max_overall = 1;
  stats.multi_round_fraction = 0.0;
  stats.histogram.assign(steps, std::vector<std::size_t>(1, samples));
  return stats;
}

MetricReport to_report(const EvalResult& eval, int epoch, const std::string& split,
                       const RunConfig& cfg) {
  MetricReport report;
  report.epoch = epoch;
  report.split = split;
  report.model = cell_kind_name(cfg.model_kind);
  report.metric_name = eval.kind == MetricKind::bpc ? "bpc" : "macro_f1";
  report.metric = eval.metric;
  report.loss = eval.mean_loss;
  report.task_loss = eval.task;
  report.ponder = eval.ponder;
  report.samples = eval.samples;
  report.per_step_metric = eval.per_step_metric;
  if (eval.has_nt) {
    report.mean_nt_per_step = eval.nt.mean_per_step;
    report.max_nt = eval.nt.max_overall;
    report.multi_round_fraction = eval.nt.multi_round_fraction;
  }
  return report;
}

/// Expected parameter shapes for a config, checked against a checkpoint.
void check_checkpoint_shapes(const RunConfig& cfg, const DatasetInfo& info,
                             const ParamStore& loaded) {
  ModelSpec spec = cfg.model_spec(info.input_dim, info.heads, info.classes);
  ParamStore expected;
  Rng rng(0);
  init_model(expected, rng, spec);
  for (const auto& [name, tensor] : expected.tensors) {
    if (!loaded.has(name))
      throw std::runtime_error("checkpoint/config mismatch: parameter '" + name +
                               "' missing from checkpoint");
    const Tensor& got = loaded.get(name);
    if (!got.same_shape(tensor))
      throw std::runtime_error("checkpoint/config mismatch: '" + name + "' has shape " +
                               got.shape_str() + " in the checkpoint but the config needs " +
                               tensor.shape_str());
  }
  for (const auto& [name, tensor] : loaded.tensors)
    if (!expected.has(name))
      throw std::runtime_error("checkpoint/config mismatch: unexpected parameter '" + name +
                               "'");
}

struct LoadedModel {
  Checkpoint ckpt;
  RunConfig cfg;
  DataBundle data;
  ModelSpec spec;
};

LoadedModel load_for_data(const std::string& checkpoint_path, const std::string& data_spec) {
  LoadedModel m;
  m.ckpt = load_checkpoint(checkpoint_path);
  m.cfg = parse_config_text(m.ckpt.config_text);
  if (!data_spec.empty()) {
    RunConfig data_cfg = load_config_file(data_spec);
    m.cfg.task = data_cfg.task;
    m.cfg.data_path = data_cfg.data_path;
    m.cfg.seq_len = data_cfg.seq_len;
    m.cfg.train_count = data_cfg.train_count;
    m.cfg.val_count = data_cfg.val_count;
    m.cfg.test_count = data_cfg.test_count;
    m.cfg.seed = data_cfg.seed;
  }
  m.data = build_datasets(m.cfg);
  check_checkpoint_shapes(m.cfg, m.data.train.info, m.ckpt.params);
  m.spec = m.cfg.model_spec(m.data.train.info.input_dim, m.data.train.info.heads,
                            m.data.train.info.classes);
  return m;
}

void write_nt_files(const ParamStore& params, const ModelSpec& spec, const RunConfig& cfg,
                    const DataBundle& data, const fs::path& dir) {
  const LossConfig loss{cfg.tau, cfg.mu};
  const MetricKind kind = metric_for_task(cfg.task);
  const std::array<std::pair<const char*, const Dataset*>, 3> splits{
      {{"train", &data.train}, {"val", &data.val}, {"test", &data.test}}};
  for (const auto& [name, ds] : splits) {
    EvalResult eval = evaluate(params, spec, cfg.mode, *ds, loss, kind);
    NtStats stats = eval.has_nt
                        ? eval.nt
                        : all_ones_stats(eval.per_step_metric.size(), eval.samples);
    const int levels = eval.has_nt ? spec.max_layers : 1;
    write_nt_distribution_csv((dir / ("nt_distribution_" + std::string(name) + ".csv")).string(),
                              stats, levels);
    write_series_csv((dir / ("per_step_metric_" + std::string(name) + ".csv")).string(),
                     eval.per_step_metric);
  }
}

}  // namespace

int cmd_train(const std::string& config_path, const std::string& out_dir, std::ostream& err) {
  try {
    RunConfig cfg = load_config_file(config_path);
    DataBundle data = build_datasets(cfg);
    const ModelSpec spec = cfg.model_spec(data.train.info.input_dim, data.train.info.heads,
                                          data.train.info.classes);

    FitOptions options;
    options.batch_size = cfg.batch;
    options.epochs = cfg.epochs;
    options.patience = cfg.patience;
    options.loss = LossConfig{cfg.tau, cfg.mu};
    options.adam.lr = cfg.lr;
    options.seed = cfg.seed;
    options.config_text = cfg.to_text();

    FitResult result = fit(spec, cfg.mode, data.train, data.val, options);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    save_checkpoint((dir / "checkpoint.bin").string(), result.best);

    std::ofstream jsonl(dir / "metrics.jsonl");
    if (!jsonl) throw std::runtime_error("cannot write metrics.jsonl");
    std::ofstream nt_epochs(dir / "nt_epochs.csv");
    if (!nt_epochs) throw std::runtime_error("cannot write nt_epochs.csv");
    nt_epochs << "epoch,mean_nt,max_nt\n";
    nt_epochs.precision(17);

    for (const EpochLog& log : result.log) {
      nlohmann::json train_line{
          {"epoch", log.epoch},
          {"split", "train"},
          {"model", cell_kind_name(cfg.model_kind)},
          {"metrics", {{"loss", log.train_loss}}},
          {"per_step", nlohmann::json::object()},
      };
      jsonl << train_line.dump() << "\n";
      jsonl << report_json(to_report(log.val, static_cast<int>(log.epoch), "val", cfg)) << "\n";

      if (log.val.has_nt) {
        double mean = 0.0;
        for (double v : log.val.nt.mean_per_step) mean += v;
        mean /= static_cast<double>(log.val.nt.mean_per_step.size());
        nt_epochs << log.epoch << "," << mean << "," << log.val.nt.max_overall << "\n";
      } else {
        nt_epochs << log.epoch << ",1,1\n";
      }
    }
    jsonl.close();

    write_nt_files(result.best.params, spec, cfg, data, dir);
    return 0;
  } catch (const std::exception& ex) {
    err << "train: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_spec,
             const std::string& split, std::ostream& out, std::ostream& err) {
  try {
    if (split != "val" && split != "test")
      throw std::invalid_argument("--split must be val or test, got '" + split + "'");
    LoadedModel m = load_for_data(checkpoint_path, data_spec);
    const Dataset& ds = split == "val" ? m.data.val : m.data.test;
    EvalResult eval = evaluate(m.ckpt.params, m.spec, m.cfg.mode, ds,
                               LossConfig{m.cfg.tau, m.cfg.mu}, metric_for_task(m.cfg.task));
    out << report_json(to_report(eval, -1, split, m.cfg)) << "\n";
    return 0;
  } catch (const std::exception& ex) {
    err << "eval: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_inspect(const std::string& checkpoint_path, const std::string& data_spec,
                const std::string& emit, std::ostream& out, std::ostream& err) {
  try {
    if (emit != "nt")
      throw std::invalid_argument("--emit supports only 'nt', got '" + emit + "'");
    LoadedModel m = load_for_data(checkpoint_path, data_spec);
    write_nt_files(m.ckpt.params, m.spec, m.cfg, m.data, fs::current_path());

    nlohmann::json fractions;
    const LossConfig loss{m.cfg.tau, m.cfg.mu};
    const MetricKind kind = metric_for_task(m.cfg.task);
    const std::array<std::pair<const char*, const Dataset*>, 3> splits{
        {{"train", &m.data.train}, {"val", &m.data.val}, {"test", &m.data.test}}};
    for (const auto& [name, ds] : splits) {
      EvalResult eval = evaluate(m.ckpt.params, m.spec, m.cfg.mode, *ds, loss, kind);
      fractions[name] = eval.has_nt ? eval.nt.multi_round_fraction : 0.0;
    }
    out << nlohmann::json{{"multi_round_fraction", fractions}}.dump() << "\n";
    return 0;
  } catch (const std::exception& ex) {
    err << "inspect: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_gradcheck(const std::string& model, const std::string& dims, std::ostream& out,
                  std::ostream& err) {
  try {
    if (dims != "small")
      throw std::invalid_argument("--dims supports only 'small', got '" + dims + "'");
    GradCheckOptions options;
    if (std::getenv("LFACT_GRADCHECK_CORRUPT")) options.corrupt_analytic = 1e-2;

    double worst = 0.0;
    auto run = [&](CellKind kind, Strategy strategy, Combiner combiner) {
      GradCheckResult r = model_grad_check(kind, strategy, combiner, 1e-4, options);
      out << model << " " << strategy_name(strategy) << " " << combiner_name(combiner)
          << " max_rel_error = " << r.max_rel_error << " (worst: " << r.worst_param << "["
          << r.worst_index << "])\n";
      worst = std::max(worst, r.max_rel_error);
    };

    if (model == "rnn") {
      run(CellKind::rnn, Strategy::all, Combiner::affine);
    } else if (model == "act") {
      run(CellKind::act, Strategy::all, Combiner::affine);
    } else if (model == "lfact") {
      for (Strategy s : {Strategy::ltd, Strategy::all})
        for (Combiner c : {Combiner::affine, Combiner::mlp}) run(CellKind::lfact, s, c);
    } else {
      throw std::invalid_argument("--model must be rnn, act, or lfact, got '" + model + "'");
    }
    out << "max_rel_error = " << worst << "\n";
    return worst < 1e-4 ? 0 : 1;
  } catch (const std::exception& ex) {
    err << "gradcheck: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_gendata(const std::string& task, std::uint64_t seed, const std::string& out_path,
                std::size_t n_samples, std::size_t seq_len, std::ostream& err) {
  try {
    Rng rng(seed);
    Dataset ds;
    if (task == "modsum") {
      ds = gen_modsum(rng, n_samples, seq_len == 0 ? 20 : seq_len);
    } else if (task == "market") {
      ds = gen_market_surrogate(rng, n_samples, seq_len == 0 ? 20 : seq_len);
    } else {
      throw std::invalid_argument("--task must be modsum or market, got '" + task + "'");
    }
    export_dataset(ds, out_path);
    return 0;
  } catch (const std::exception& ex) {
    err << "gendata: " << ex.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"dynamic-depth recurrent network lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* train = app.add_subcommand("train", "train a model from a config file");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--out", out_dir, "output directory")->required();

  std::string ckpt_path, data_spec, split = "val";
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eval->add_option("--data", data_spec, "config file overriding the data source");
  eval->add_option("--split", split, "val or test");

  std::string inspect_ckpt, inspect_data, emit = "nt";
  auto* inspect = app.add_subcommand("inspect", "emit halting statistics");
  inspect->add_option("--checkpoint", inspect_ckpt, "checkpoint file")->required();
  inspect->add_option("--data", inspect_data, "config file overriding the data source");
  inspect->add_option("--emit", emit, "what to emit (nt)");

  std::string model, dims = "small";
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--model", model, "rnn, act, or lfact")->required();
  gradcheck->add_option("--dims", dims, "model size (small)");

  std::string task, gen_out;
  std::uint64_t seed = 1;
  std::size_t n_samples = 100, seq_len = 0;
  auto* gendata = app.add_subcommand("gendata", "write a synthetic dataset export");
  gendata->add_option("--task", task, "modsum or market")->required();
  gendata->add_option("--seed", seed, "generator seed");
  gendata->add_option("--out", gen_out, "output path")->required();
  gendata->add_option("--n", n_samples, "sample count");
  gendata->add_option("--seq-len", seq_len, "sequence length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, std::cout, std::cerr);
  }

  if (train->parsed()) return cmd_train(config_path, out_dir, std::cerr);
  if (eval->parsed()) return cmd_eval(ckpt_path, data_spec, split, std::cout, std::cerr);
  if (inspect->parsed())
    return cmd_inspect(inspect_ckpt, inspect_data, emit, std::cout, std::cerr);
  if (gradcheck->parsed()) return cmd_gradcheck(model, dims, std::cout, std::cerr);
  if (gendata->parsed()) return cmd_gendata(task, seed, gen_out, n_samples, seq_len, std::cerr);
  return 1;
}

}  // namespace lfact
