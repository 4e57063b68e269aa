#include "lfact/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfact {

namespace {

double eval(const ScalarFn& f, const ParamStore& params) {
  Tape tape;
  BoundParams bound = bind(tape, params);
  Var loss = f(tape, bound);
  const Tensor& v = tape.value(loss);
  if (v.numel() != 1)
    throw std::invalid_argument("grad_check: f must be scalar, got " + v.shape_str());
  return v[0];
}

}  // namespace

std::map<std::string, Tensor> analytic_gradients(const ScalarFn& f, const ParamStore& params) {
  Tape tape;
  BoundParams bound = bind(tape, params);
  Var loss = f(tape, bound);
  auto grads = tape.backward(loss);
  std::map<std::string, Tensor> out;
  for (const auto& [name, var] : bound.vars) out.emplace(name, grads.grad(var));
  return out;
}

GradCheckResult grad_check(const ScalarFn& f, const ParamStore& params, double step,
                           const GradCheckOptions& options) {
  if (!(step >= 1e-7 && step <= 1e-3))
    throw std::invalid_argument("grad_check: step must lie in [1e-7, 1e-3]");

  auto analytic = analytic_gradients(f, params);
  if (options.corrupt_analytic != 0.0 && !analytic.empty())
    analytic.begin()->second[0] += options.corrupt_analytic;

  GradCheckResult result;
  ParamStore probe = params;
  for (const auto& [name, tensor] : params.tensors) {
    Tensor& mutable_t = probe.get(name);
    const Tensor& a_grad = analytic.at(name);
    for (std::size_t i = 0; i < tensor.numel(); ++i) {
      const double saved = mutable_t[i];
      mutable_t[i] = saved + step;
      const double up = eval(f, probe);
      mutable_t[i] = saved - step;
      const double down = eval(f, probe);
      mutable_t[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw std::runtime_error("grad_check: f non-finite at perturbed '" + name +
                                 "' index " + std::to_string(i));
      const double numeric = (up - down) / (2.0 * step);
      const double a = a_grad[i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace lfact
