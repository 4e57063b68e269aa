#pragma once

#include <functional>
#include <map>
#include <string>

#include "lfact/param_store.hpp"

namespace lfact {

/// Scalar function of the parameters, expressed as a traced computation.
/// Must be deterministic: two calls with equal parameters must produce the
/// same value.
using ScalarFn = std::function<Var(Tape&, const BoundParams&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
};

struct GradCheckOptions {
  /// Offset added to one analytic gradient coordinate; harness self-test
  /// hook, keep 0 in normal use.
  double corrupt_analytic = 0.0;
};

/// Compares backward() against central differences (f(p+h) - f(p-h)) / 2h,
/// coordinate by coordinate, and reports the worst relative error
/// |a - n| / max(|a|, |n|, 1e-8). Step must lie in [1e-7, 1e-3].
GradCheckResult grad_check(const ScalarFn& f, const ParamStore& params, double step,
                           const GradCheckOptions& options = {});

/// Analytic gradients of f at params, keyed by parameter name.
std::map<std::string, Tensor> analytic_gradients(const ScalarFn& f, const ParamStore& params);

}  // namespace lfact
