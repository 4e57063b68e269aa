#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lfact/param_store.hpp"

namespace lfact {

struct AdamConfig {
  double lr = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  std::int64_t step = 0;
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
};

/// On disk (all integers little-endian):
///   magic "LFCK" | format version u32 | config length u32 + UTF-8 config
///   text | tensor count u32 | per tensor: name length u16 + name, rank u8,
///   dims u64 each, row-major fp64 payload | optional optimizer section,
///   same tensor encoding ("m:<name>", "v:<name>", plus "__adam__" =
///   [step, lr, beta1, beta2, eps, best_metric-or-NaN]).
struct Checkpoint {
  std::uint32_t version = 1;
  std::string config_text;
  ParamStore params;
  bool has_optimizer = false;
  AdamState adam;
  std::optional<double> best_metric;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Distinguishes bad magic, unsupported version, and truncation in its
/// diagnostics.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lfact
