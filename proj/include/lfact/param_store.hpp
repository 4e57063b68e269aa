#pragma once

#include <map>
#include <string>

#include "lfact/rng.hpp"
#include "lfact/tape.hpp"
#include "lfact/tensor.hpp"

namespace lfact {

/// Named trainable tensors. std::map keeps iteration order deterministic,
/// which checkpointing and the optimizer rely on.
struct ParamStore {
  std::map<std::string, Tensor> tensors;

  void add(const std::string& name, Tensor t);
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);
  bool has(const std::string& name) const { return tensors.count(name) != 0; }
  std::size_t total_elements() const;
};

/// Glorot uniform: U(-b, b) with b = sqrt(6 / (rows + cols)).
Tensor glorot_init(Rng& rng, std::size_t rows, std::size_t cols);

/// Per-tape binding of a ParamStore: every tensor registered as a leaf, in
/// store order, so gradients can be keyed back by name.
struct BoundParams {
  std::map<std::string, Var> vars;
  Var at(const std::string& name) const;
};

BoundParams bind(Tape& tape, const ParamStore& params);

}  // namespace lfact
