#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lfact {

/// Dense row-major fp64 array. Values are expected to stay finite; the
/// primitive kernels below reject inputs that would introduce NaN/Inf.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double v);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t numel() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // rank-2 accessors
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t r, std::size_t c);
  double at(std::size_t r, std::size_t c) const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool bitwise_equal(const Tensor& other) const;
  bool all_finite() const;
  std::string shape_str() const;  // e.g. "[2 x 3]"

private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

enum class Primitive {
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
};

const char* primitive_name(Primitive kind);

/// Extra arguments for primitives that need them (slice offsets, scale factor).
struct PrimitiveArgs {
  std::size_t offset = 0;
  std::size_t length = 0;
  double factor = 1.0;
};

// Pure forward kernels. Shape rules:
//   matmul:   [m x k]*[k x n] -> [m x n], [m x k]*[k] -> [m], [k]*[k x n] -> [n]
//   add:      identical shapes, elementwise
//   mul:      identical shapes, or either operand a 1-element scalar (broadcast)
//   concat:   rank-1 operands, joined in order
//   slice:    flat row-major window [offset, offset+length) -> rank-1
//   sum:      all elements -> [1]
//   transpose: rank-2 only
//   sigmoid/tanh/relu/neg: elementwise, any shape
//   log:      elementwise, every element must be > 0
//   scale:    multiply by a compile-time constant factor
namespace ops {
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor concat(std::span<const Tensor> parts);
Tensor slice(const Tensor& a, std::size_t offset, std::size_t length);
Tensor sum(const Tensor& a);
Tensor transpose(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor log(const Tensor& a);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double factor);

/// Rank-1 softmax with max subtraction. Output sums to 1 within 1e-12.
Tensor softmax(const Tensor& v);
}  // namespace ops

/// Untraced dispatch over the primitive set; the traced counterpart lives on
/// Tape. Rejects operand shapes that break the rules above.
Tensor apply_primitive(Primitive kind, std::span<const Tensor> operands,
                       const PrimitiveArgs& args = {});

}  // namespace lfact
