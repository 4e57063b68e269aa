#include "lfact/tape.hpp"

#include <stdexcept>
#include <string>

namespace lfact {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void accumulate(Tensor& slot, Tensor&& contrib) {
  if (slot.empty()) {
    slot = std::move(contrib);
    return;
  }
  for (std::size_t i = 0; i < slot.numel(); ++i) slot[i] += contrib[i];
}

}  // namespace

Var Tape::push(NodeOp op, std::vector<std::uint32_t> inputs, PrimitiveArgs args, Tensor value) {
  nodes_.push_back(Node{op, std::move(inputs), args, std::move(value)});
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor value) { return push(NodeOp::leaf, {}, {}, std::move(value)); }

const Tensor& Tape::value(Var v) const {
  if (v.id >= nodes_.size()) fail("tape: value reference " + std::to_string(v.id) + " not on tape");
  return nodes_[v.id].value;
}

Var Tape::matmul(Var a, Var b) {
  return push(NodeOp::matmul, {a.id, b.id}, {}, ops::matmul(value(a), value(b)));
}

Var Tape::add(Var a, Var b) {
  return push(NodeOp::add, {a.id, b.id}, {}, ops::add(value(a), value(b)));
}

Var Tape::mul(Var a, Var b) {
  return push(NodeOp::mul, {a.id, b.id}, {}, ops::mul(value(a), value(b)));
}

Var Tape::concat(std::span<const Var> parts) {
  std::vector<Tensor> vals;
  std::vector<std::uint32_t> ids;
  vals.reserve(parts.size());
  ids.reserve(parts.size());
  for (Var p : parts) {
    vals.push_back(value(p));
    ids.push_back(p.id);
  }
  return push(NodeOp::concat, std::move(ids), {}, ops::concat(vals));
}

Var Tape::slice(Var a, std::size_t offset, std::size_t length) {
  PrimitiveArgs args;
  args.offset = offset;
  args.length = length;
  return push(NodeOp::slice, {a.id}, args, ops::slice(value(a), offset, length));
}

Var Tape::sum(Var a) { return push(NodeOp::sum, {a.id}, {}, ops::sum(value(a))); }

Var Tape::transpose(Var a) {
  return push(NodeOp::transpose, {a.id}, {}, ops::transpose(value(a)));
}

Var Tape::sigmoid(Var a) { return push(NodeOp::sigmoid, {a.id}, {}, ops::sigmoid(value(a))); }
Var Tape::tanh(Var a) { return push(NodeOp::tanh, {a.id}, {}, ops::tanh(value(a))); }
Var Tape::relu(Var a) { return push(NodeOp::relu, {a.id}, {}, ops::relu(value(a))); }
Var Tape::log(Var a) { return push(NodeOp::log, {a.id}, {}, ops::log(value(a))); }
Var Tape::neg(Var a) { return push(NodeOp::neg, {a.id}, {}, ops::neg(value(a))); }

Var Tape::scale(Var a, double factor) {
  PrimitiveArgs args;
  args.factor = factor;
  return push(NodeOp::scale, {a.id}, args, ops::scale(value(a), factor));
}

Var Tape::softmax(Var a) { return push(NodeOp::softmax, {a.id}, {}, ops::softmax(value(a))); }

Var Tape::apply(Primitive kind, std::span<const Var> operands, const PrimitiveArgs& args) {
  auto want = [&](std::size_t n) {
    if (operands.size() != n)
      fail(std::string(primitive_name(kind)) + ": expected " + std::to_string(n) +
           " operands, got " + std::to_string(operands.size()));
  };
  switch (kind) {
    case Primitive::matmul: want(2); return matmul(operands[0], operands[1]);
    case Primitive::add: want(2); return add(operands[0], operands[1]);
    case Primitive::mul: want(2); return mul(operands[0], operands[1]);
    case Primitive::concat: return concat(operands);
    case Primitive::slice: want(1); return slice(operands[0], args.offset, args.length);
    case Primitive::sum: want(1); return sum(operands[0]);
    case Primitive::transpose: want(1); return transpose(operands[0]);
    case Primitive::sigmoid: want(1); return sigmoid(operands[0]);
    case Primitive::tanh: want(1); return tanh(operands[0]);
    case Primitive::relu: want(1); return relu(operands[0]);
    case Primitive::log: want(1); return log(operands[0]);
    case Primitive::neg: want(1); return neg(operands[0]);
    case Primitive::scale: want(1); return scale(operands[0], args.factor);
  }
  fail("apply: unknown primitive");
}

Tape::GradMap Tape::backward(Var loss) const {
  if (loss.id >= nodes_.size()) fail("backward: loss is not on this tape");
  if (nodes_[loss.id].value.numel() != 1)
    fail("backward: loss must be scalar, got " + nodes_[loss.id].value.shape_str());

  std::vector<Tensor> adj(nodes_.size());
  adj[loss.id] = Tensor::full(nodes_[loss.id].value.shape(), 1.0);

  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (adj[id].empty() || node.op == NodeOp::leaf) continue;
    const Tensor& g = adj[id];
    const Tensor& y = node.value;

    switch (node.op) {
      case NodeOp::matmul: {
        const Tensor& a = nodes_[node.inputs[0]].value;
        const Tensor& b = nodes_[node.inputs[1]].value;
        // treat all cases in flat (m, k, n) space, then reuse operand shapes
        const std::size_t k = (a.rank() == 2) ? a.cols() : a.numel();
        const std::size_t m = a.numel() / k;
        const std::size_t n = b.numel() / k;
        Tensor da(a.shape());
        Tensor db(b.shape());
        const double* pg = g.data().data();
        const double* pa = a.data().data();
        const double* pb = b.data().data();
        double* pda = da.data().data();
        double* pdb = db.data().data();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t t = 0; t < k; ++t) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += pg[i * n + j] * pb[t * n + j];
            pda[i * k + t] = acc;
          }
        for (std::size_t t = 0; t < k; ++t)
          for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) acc += pa[i * k + t] * pg[i * n + j];
            pdb[t * n + j] = acc;
          }
        accumulate(adj[node.inputs[0]], std::move(da));
        accumulate(adj[node.inputs[1]], std::move(db));
        break;
      }
      case NodeOp::add: {
        accumulate(adj[node.inputs[0]], Tensor(g));
        accumulate(adj[node.inputs[1]], Tensor(g));
        break;
      }
      case NodeOp::mul: {
        const Tensor& a = nodes_[node.inputs[0]].value;
        const Tensor& b = nodes_[node.inputs[1]].value;
        if (a.same_shape(b)) {
          accumulate(adj[node.inputs[0]], ops::mul(g, b));
          accumulate(adj[node.inputs[1]], ops::mul(g, a));
        } else if (b.numel() == 1) {
          accumulate(adj[node.inputs[0]], ops::scale(g, b[0]));
          accumulate(adj[node.inputs[1]], ops::sum(ops::mul(g, a)));
        } else {
          accumulate(adj[node.inputs[0]], ops::sum(ops::mul(g, b)));
          accumulate(adj[node.inputs[1]], ops::scale(g, a[0]));
        }
        break;
      }
      case NodeOp::concat: {
        std::size_t pos = 0;
        for (std::uint32_t in : node.inputs) {
          const std::size_t len = nodes_[in].value.numel();
          accumulate(adj[in], ops::slice(g, pos, len));
          pos += len;
        }
        break;
      }
      case NodeOp::slice: {
        const Tensor& a = nodes_[node.inputs[0]].value;
        Tensor da(a.shape());
        for (std::size_t i = 0; i < node.args.length; ++i) da[node.args.offset + i] = g[i];
        accumulate(adj[node.inputs[0]], std::move(da));
        break;
      }
      case NodeOp::sum: {
        accumulate(adj[node.inputs[0]],
                   Tensor::full(nodes_[node.inputs[0]].value.shape(), g[0]));
        break;
      }
      case NodeOp::transpose: {
        accumulate(adj[node.inputs[0]], ops::transpose(g));
        break;
      }
      case NodeOp::sigmoid: {
        Tensor da(y.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) da[i] = g[i] * y[i] * (1.0 - y[i]);
        accumulate(adj[node.inputs[0]], std::move(da));
        break;
      }
      case NodeOp::tanh: {
        Tensor da(y.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) da[i] = g[i] * (1.0 - y[i] * y[i]);
        accumulate(adj[node.inputs[0]], std::move(da));
        break;
      }
      case NodeOp::relu: {
        const Tensor& a = nodes_[node.inputs[0]].value;
        Tensor da(a.shape());
        for (std::size_t i = 0; i < a.numel(); ++i) da[i] = a[i] > 0 ? g[i] : 0.0;
        accumulate(adj[node.inputs[0]], std::move(da));
        break;
      }
      case NodeOp::log: {
        const Tensor& a = nodes_[node.inputs[0]].value;
        Tensor da(a.shape());
        for (std::size_t i = 0; i < a.numel(); ++i) da[i] = g[i] / a[i];
        accumulate(adj[node.inputs[0]], std::move(da));
        break;
      }
      case NodeOp::neg: {
        accumulate(adj[node.inputs[0]], ops::neg(g));
        break;
      }
      case NodeOp::scale: {
        accumulate(adj[node.inputs[0]], ops::scale(g, node.args.factor));
        break;
      }
      case NodeOp::softmax: {
        double dot = 0.0;
        for (std::size_t i = 0; i < y.numel(); ++i) dot += g[i] * y[i];
        Tensor da(y.shape());
        for (std::size_t i = 0; i < y.numel(); ++i) da[i] = y[i] * (g[i] - dot);
        accumulate(adj[node.inputs[0]], std::move(da));
        break;
      }
      case NodeOp::leaf:
        break;
    }
  }

  return GradMap(this, std::move(adj));
}

bool Tape::replay_matches() const {
  for (const Node& node : nodes_) {
    if (node.op == NodeOp::leaf) continue;
    std::vector<Tensor> operands;
    operands.reserve(node.inputs.size());
    for (std::uint32_t in : node.inputs) operands.push_back(nodes_[in].value);
    Tensor redo = (node.op == NodeOp::softmax)
                      ? ops::softmax(operands[0])
                      : apply_primitive(static_cast<Primitive>(static_cast<int>(node.op) - 1),
                                        operands, node.args);
    if (!redo.bitwise_equal(node.value)) return false;
  }
  return true;
}

const Tensor& Tape::GradMap::grad(Var v) {
  if (v.id >= adjoints_.size()) fail("grad: value reference not on tape");
  if (adjoints_[v.id].empty()) adjoints_[v.id] = Tensor::zeros(tape_->value(v).shape());
  return adjoints_[v.id];
}

}  // namespace lfact
