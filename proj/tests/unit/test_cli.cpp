#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lfact/cli.hpp"

using namespace lfact;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

const char* kTinyModsum =
    "data.task = modsum\n"
    "model.kind = lfact\n"
    "model.hidden = 8\n"
    "model.max_layers = 2\n"
    "data.seq_len = 6\n"
    "data.train_count = 12\n"
    "data.val_count = 6\n"
    "data.test_count = 6\n"
    "optim.batch = 4\n"
    "train.epochs = 1\n"
    "seed = 3\n";

}  // namespace

TEST_CASE("cmd_gendata: deterministic files, record count follows --n") {
  fs::path dir = temp_dir("lfact_cli_gendata");
  std::ostringstream err;
  const std::string out1 = (dir / "a.tsv").string();
  const std::string out2 = (dir / "b.tsv").string();
  CHECK(cmd_gendata("modsum", 5, out1, 9, 10, err) == 0);
  CHECK(cmd_gendata("modsum", 5, out2, 9, 10, err) == 0);
  CHECK(slurp(out1) == slurp(out2));

  std::istringstream lines(slurp(out1));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 9);

  CHECK(cmd_gendata("market", 5, (dir / "m.tsv").string(), 3, 8, err) == 0);
  CHECK(cmd_gendata("nope", 5, (dir / "x.tsv").string(), 3, 8, err) != 0);
  fs::remove_all(dir);
}

TEST_CASE("cmd_train: missing config exits nonzero without touching the out dir") {
  fs::path dir = fs::temp_directory_path() / "lfact_cli_missing_out";
  fs::remove_all(dir);
  std::ostringstream err;
  CHECK(cmd_train("/nonexistent/config.cfg", dir.string(), err) != 0);
  CHECK(!fs::exists(dir));
  CHECK(!err.str().empty());
}

TEST_CASE("cmd_train + cmd_eval: end to end on a tiny modsum config") {
  fs::path dir = temp_dir("lfact_cli_train");
  const std::string config = write_file(dir / "run.cfg", kTinyModsum);
  std::ostringstream err;
  REQUIRE(cmd_train(config, (dir / "out").string(), err) == 0);

  CHECK(fs::exists(dir / "out" / "checkpoint.bin"));
  CHECK(fs::exists(dir / "out" / "metrics.jsonl"));
  CHECK(fs::exists(dir / "out" / "nt_epochs.csv"));
  for (const char* split : {"train", "val", "test"}) {
    CHECK(fs::exists(dir / "out" / ("nt_distribution_" + std::string(split) + ".csv")));
    CHECK(fs::exists(dir / "out" / ("per_step_metric_" + std::string(split) + ".csv")));
  }

  // metrics.jsonl has one train and one val line per epoch
  std::istringstream lines(slurp(dir / "out" / "metrics.jsonl"));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    ++count;
    CHECK(line.find("\"epoch\"") != std::string::npos);
  }
  CHECK(count == 2);

  // eval prints identical JSON bytes on repeat runs
  std::ostringstream out1, out2, err2;
  REQUIRE(cmd_eval((dir / "out" / "checkpoint.bin").string(), "", "val", out1, err2) == 0);
  REQUIRE(cmd_eval((dir / "out" / "checkpoint.bin").string(), "", "test", out2, err2) == 0);
  std::ostringstream out1b;
  REQUIRE(cmd_eval((dir / "out" / "checkpoint.bin").string(), "", "val", out1b, err2) == 0);
  CHECK(out1.str() == out1b.str());
  CHECK(out1.str() != out2.str());
  CHECK(out1.str().find("macro_f1") != std::string::npos);

  CHECK(cmd_eval((dir / "out" / "checkpoint.bin").string(), "", "bogus", out1, err2) != 0);
  fs::remove_all(dir);
}

TEST_CASE("cmd_eval: dimension mismatch produces an explicit diagnostic") {
  fs::path dir = temp_dir("lfact_cli_mismatch");
  const std::string config = write_file(dir / "run.cfg", kTinyModsum);
  std::ostringstream err;
  REQUIRE(cmd_train(config, (dir / "out").string(), err) == 0);

  // same data but a different hidden size
  std::string other = std::string(kTinyModsum);
  const auto pos = other.find("model.hidden = 8");
  other.replace(pos, 16, "model.hidden = 9");
  // rewrite the checkpoint's config so dims disagree with the stored tensors
  Checkpoint ckpt = load_checkpoint((dir / "out" / "checkpoint.bin").string());
  ckpt.config_text = parse_config_text(other).to_text();
  save_checkpoint((dir / "out" / "checkpoint.bin").string(), ckpt);

  std::ostringstream out, err2;
  CHECK(cmd_eval((dir / "out" / "checkpoint.bin").string(), "", "val", out, err2) != 0);
  CHECK(err2.str().find("mismatch") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cmd_inspect: nt distribution files with conserved column sums") {
  fs::path dir = temp_dir("lfact_cli_inspect");
  const std::string config = write_file(dir / "run.cfg", kTinyModsum);
  std::ostringstream err;
  REQUIRE(cmd_train(config, (dir / "out").string(), err) == 0);

  const fs::path cwd = fs::current_path();
  fs::current_path(dir);
  std::ostringstream out, err2;
  REQUIRE(cmd_inspect((dir / "out" / "checkpoint.bin").string(), "", "nt", out, err2) == 0);
  fs::current_path(cwd);

  CHECK(out.str().find("multi_round_fraction") != std::string::npos);
  const std::string csv = slurp(dir / "nt_distribution_val.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "step,mean_nt,max_nt,count_1,count_2");

  std::string row;
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    // count columns sum to the sample count (6 val samples)
    std::istringstream cells(row);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    REQUIRE(fields.size() == 5);
    CHECK(std::stoul(fields[3]) + std::stoul(fields[4]) == 6);
  }
  CHECK(rows == 6);

  std::ostringstream out3, err3;
  CHECK(cmd_inspect((dir / "out" / "checkpoint.bin").string(), "", "bogus", out3, err3) != 0);
  fs::remove_all(dir);
}

TEST_CASE("cmd_gradcheck: passes normally, fails with the corruption hook") {
  std::ostringstream out, err;
  CHECK(cmd_gradcheck("rnn", "small", out, err) == 0);
  CHECK(out.str().find("max_rel_error") != std::string::npos);

  setenv("LFACT_GRADCHECK_CORRUPT", "1", 1);
  std::ostringstream out2, err2;
  CHECK(cmd_gradcheck("rnn", "small", out2, err2) != 0);
  unsetenv("LFACT_GRADCHECK_CORRUPT");

  std::ostringstream out3, err3;
  CHECK(cmd_gradcheck("transformer", "small", out3, err3) != 0);
}

TEST_CASE("run_cli: parses subcommands") {
  fs::path dir = temp_dir("lfact_cli_argv");
  const std::string out_path = (dir / "g.tsv").string();
  const char* argv[] = {"lfact", "gendata", "--task", "modsum", "--seed", "4",
                        "--out", out_path.c_str(), "--n", "5", "--seq-len", "8"};
  CHECK(run_cli(12, argv) == 0);
  CHECK(fs::exists(out_path));
  fs::remove_all(dir);
}
