#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lfact/tensor.hpp"

namespace lfact {

/// Handle to a value recorded on a Tape. Plain index; cheap to copy.
struct Var {
  std::uint32_t id = 0;
};

/// Record of primitive applications in topological order. Each traced call
/// stores its operands, arguments, and forward result, so the tape can be
/// differentiated in reverse or replayed forward. A tape is confined to one
/// execution context; independent tapes may run in parallel.
class Tape {
public:
  /// Registers an input value. Leaves are what backward() differentiates
  /// with respect to; constants are just leaves whose gradient is ignored.
  Var leaf(Tensor value);
  Var scalar(double v) { return leaf(Tensor::scalar(v)); }

  const Tensor& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var concat(std::span<const Var> parts);
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var sum(Var a);
  Var transpose(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var log(Var a);
  Var neg(Var a);
  Var scale(Var a, double factor);
  Var softmax(Var a);

  /// Traced dispatch over the primitive set.
  Var apply(Primitive kind, std::span<const Var> operands, const PrimitiveArgs& args = {});

  class GradMap;
  GradMap backward(Var loss) const;

  /// Recomputes every non-leaf node from its operands and checks the stored
  /// values are reproduced bitwise.
  bool replay_matches() const;

private:
  // Primitives in declaration order, preceded by leaf and followed by
  // softmax; replay_matches relies on the offset.
  enum class NodeOp : std::uint8_t {
    leaf,
    matmul,
    add,
    mul,
    concat,
    slice,
    sum,
    transpose,
    sigmoid,
    tanh,
    relu,
    log,
    neg,
    scale,
    softmax,
  };

  struct Node {
    NodeOp op = NodeOp::leaf;
    std::vector<std::uint32_t> inputs;
    PrimitiveArgs args;
    Tensor value;
  };

  Var push(NodeOp op, std::vector<std::uint32_t> inputs, PrimitiveArgs args, Tensor value);
  std::vector<Node> nodes_;
};

class Tape::GradMap {
public:
  /// Gradient of the loss w.r.t. the given node; zero tensor for leaves the
  /// loss does not depend on.
  const Tensor& grad(Var v);

private:
  friend class Tape;
  GradMap(const Tape* tape, std::vector<Tensor> adjoints)
      : tape_(tape), adjoints_(std::move(adjoints)) {}
  const Tape* tape_;
  std::vector<Tensor> adjoints_;
};

}  // namespace lfact
