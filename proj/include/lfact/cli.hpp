#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "lfact/config.hpp"
#include "lfact/data.hpp"
#include "lfact/training.hpp"

namespace lfact {

struct DataBundle {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Materializes the three splits a config describes, deterministically from
/// its seed.
DataBundle build_datasets(const RunConfig& cfg);

// Command bodies, exposed so tests can drive them in-process. Diagnostics go
// to err; each returns a process exit status.
int cmd_train(const std::string& config_path, const std::string& out_dir, std::ostream& err);
int cmd_eval(const std::string& checkpoint_path, const std::string& data_spec,
             const std::string& split, std::ostream& out, std::ostream& err);
int cmd_inspect(const std::string& checkpoint_path, const std::string& data_spec,
                const std::string& emit, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const std::string& model, const std::string& dims, std::ostream& out,
                  std::ostream& err);
int cmd_gendata(const std::string& task, std::uint64_t seed, const std::string& out_path,
                std::size_t n_samples, std::size_t seq_len, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace lfact
