#include "lfact/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace lfact {

void ParamStore::add(const std::string& name, Tensor t) {
  if (tensors.count(name))
    throw std::invalid_argument("param '" + name + "' already present");
  tensors.emplace(name, std::move(t));
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::invalid_argument("param '" + name + "' not found");
  return it->second;
}

Tensor& ParamStore::get(const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw std::invalid_argument("param '" + name + "' not found");
  return it->second;
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors) n += t.numel();
  return n;
}

Tensor glorot_init(Rng& rng, std::size_t rows, std::size_t cols) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("glorot_init: dimensions must be at least 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t({rows, cols});
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

Var BoundParams::at(const std::string& name) const {
  auto it = vars.find(name);
  if (it == vars.end()) throw std::invalid_argument("bound param '" + name + "' not found");
  return it->second;
}

BoundParams bind(Tape& tape, const ParamStore& params) {
  BoundParams bound;
  for (const auto& [name, tensor] : params.tensors) bound.vars.emplace(name, tape.leaf(tensor));
  return bound;
}

}  // namespace lfact
