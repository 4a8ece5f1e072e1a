#pragma once

#include <functional>

#include "blindguard/autodiff.hpp"

namespace blindguard {

/// Builds a scalar on `graph` from the leaf holding x.
using ScalarFunction = std::function<Var(Graph& graph, Var x)>;

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

/// Compares the analytic gradient of f at x against central differences,
/// coordinate by coordinate. The relative error of a coordinate is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor).
GradientCheck finite_diff_check(const ScalarFunction& f, const Tensor& x, double step = 1e-5,
                                double floor = 1e-6);

}  // namespace blindguard
