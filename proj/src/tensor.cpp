#include "lfact/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace lfact {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {
  for (std::size_t d : shape_)
    if (d == 0) fail("tensor extents must be positive, got " + shape_str());
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t d : shape_)
    if (d == 0) fail("tensor extents must be positive, got " + shape_str());
  if (shape_product(shape_) != data_.size())
    fail("tensor data length " + std::to_string(data_.size()) +
         " does not match shape " + shape_str());
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), v);
  return t;
}

std::size_t Tensor::rows() const {
  if (rank() != 2) fail("rows() on tensor of shape " + shape_str());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) fail("cols() on tensor of shape " + shape_str());
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
double Tensor::at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

bool Tensor::bitwise_equal(const Tensor& other) const {
  return shape_ == other.shape_ &&
         std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? " x " : "") << shape_[i];
  os << "]";
  return os.str();
}

const char* primitive_name(Primitive kind) {
  switch (kind) {
    case Primitive::matmul: return "matmul";
    case Primitive::add: return "add";
    case Primitive::mul: return "mul";
    case Primitive::concat: return "concat";
    case Primitive::slice: return "slice";
    case Primitive::sum: return "sum";
    case Primitive::transpose: return "transpose";
    case Primitive::sigmoid: return "sigmoid";
    case Primitive::tanh: return "tanh";
    case Primitive::relu: return "relu";
    case Primitive::log: return "log";
    case Primitive::neg: return "neg";
    case Primitive::scale: return "scale";
  }
  return "?";
}

namespace ops {

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  fail(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " + b.shape_str());
}

Tensor map(const Tensor& a, double (*f)(double)) {
  Tensor out(a.shape());
  const auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  std::size_t m, k, n;
  if (a.rank() == 2 && b.rank() == 2) {
    m = a.rows(); k = a.cols(); n = b.cols();
    if (b.rows() != k) shape_error("matmul", a, b);
  } else if (a.rank() == 2 && b.rank() == 1) {
    m = a.rows(); k = a.cols(); n = 1;
    if (b.numel() != k) shape_error("matmul", a, b);
  } else if (a.rank() == 1 && b.rank() == 2) {
    m = 1; k = a.numel(); n = b.cols();
    if (b.rows() != k) shape_error("matmul", a, b);
  } else {
    shape_error("matmul", a, b);
  }

  std::vector<std::size_t> out_shape;
  if (a.rank() == 2 && b.rank() == 2) out_shape = {m, n};
  else if (b.rank() == 1) out_shape = {m};
  else out_shape = {n};

  Tensor out(out_shape);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      const double* row = pa + i * k;
      for (std::size_t t = 0; t < k; ++t) acc += row[t] * pb[t * n + j];
      po[i * n + j] = acc;
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("add", a, b);
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.same_shape(b)) {
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] * b[i];
    return out;
  }
  if (b.numel() == 1) {
    Tensor out(a.shape());
    const double s = b[0];
    for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] * s;
    return out;
  }
  if (a.numel() == 1) {
    Tensor out(b.shape());
    const double s = a[0];
    for (std::size_t i = 0; i < b.numel(); ++i) out[i] = s * b[i];
    return out;
  }
  shape_error("mul", a, b);
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) fail("concat: no operands");
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != 1) fail("concat: rank-1 operands required, got " + p.shape_str());
    total += p.numel();
  }
  Tensor out({total});
  std::size_t pos = 0;
  for (const Tensor& p : parts)
    for (std::size_t i = 0; i < p.numel(); ++i) out[pos++] = p[i];
  return out;
}

Tensor slice(const Tensor& a, std::size_t offset, std::size_t length) {
  if (length == 0 || offset + length > a.numel())
    fail("slice: window [" + std::to_string(offset) + ", " +
         std::to_string(offset + length) + ") out of range for " + a.shape_str());
  Tensor out({length});
  for (std::size_t i = 0; i < length; ++i) out[i] = a[offset + i];
  return out;
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i];
  return Tensor::scalar(acc);
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) fail("transpose: rank-2 required, got " + a.shape_str());
  Tensor out({a.cols(), a.rows()});
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out.at(c, r) = a.at(r, c);
  return out;
}

Tensor sigmoid(const Tensor& a) {
  return map(a, [](double x) {
    // split on sign so exp never overflows
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

Tensor tanh(const Tensor& a) {
  return map(a, [](double x) { return std::tanh(x); });
}

Tensor relu(const Tensor& a) {
  return map(a, [](double x) { return x > 0 ? x : 0.0; });
}

Tensor log(const Tensor& a) {
  for (std::size_t i = 0; i < a.numel(); ++i)
    if (!(a[i] > 0))
      fail("log: element " + std::to_string(i) + " is " + std::to_string(a[i]) +
           ", domain is strictly positive");
  return map(a, [](double x) { return std::log(x); });
}

Tensor neg(const Tensor& a) {
  return map(a, [](double x) { return -x; });
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] * factor;
  return out;
}

Tensor softmax(const Tensor& v) {
  if (v.rank() != 1 || v.numel() == 0) fail("softmax: non-empty rank-1 input required");
  double m = v[0];
  for (std::size_t i = 1; i < v.numel(); ++i) m = std::max(m, v[i]);
  Tensor out(v.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < v.numel(); ++i) {
    out[i] = std::exp(v[i] - m);
    total += out[i];
  }
  for (std::size_t i = 0; i < v.numel(); ++i) out[i] /= total;
  return out;
}

}  // namespace ops

Tensor apply_primitive(Primitive kind, std::span<const Tensor> operands,
                       const PrimitiveArgs& args) {
  auto want = [&](std::size_t n) {
    if (operands.size() != n)
      fail(std::string(primitive_name(kind)) + ": expected " + std::to_string(n) +
           " operands, got " + std::to_string(operands.size()));
  };
  switch (kind) {
    case Primitive::matmul: want(2); return ops::matmul(operands[0], operands[1]);
    case Primitive::add: want(2); return ops::add(operands[0], operands[1]);
    case Primitive::mul: want(2); return ops::mul(operands[0], operands[1]);
    case Primitive::concat: return ops::concat(operands);
    case Primitive::slice: want(1); return ops::slice(operands[0], args.offset, args.length);
    case Primitive::sum: want(1); return ops::sum(operands[0]);
    case Primitive::transpose: want(1); return ops::transpose(operands[0]);
    case Primitive::sigmoid: want(1); return ops::sigmoid(operands[0]);
    case Primitive::tanh: want(1); return ops::tanh(operands[0]);
    case Primitive::relu: want(1); return ops::relu(operands[0]);
    case Primitive::log: want(1); return ops::log(operands[0]);
    case Primitive::neg: want(1); return ops::neg(operands[0]);
    case Primitive::scale: want(1); return ops::scale(operands[0], args.factor);
  }
  fail("apply_primitive: unknown kind");
}

}  // namespace lfact
