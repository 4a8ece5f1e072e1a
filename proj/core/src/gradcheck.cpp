#include "blindguard/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "blindguard/errors.hpp"

namespace blindguard {

namespace {

double evaluate(const ScalarFunction& f, const Tensor& x) {
  Graph graph;
  Var out = f(graph, graph.leaf(x, false));
  if (out.value().size() != 1) throw ContractError("finite_diff_check: function must return a scalar");
  return out.value()[0];
}

}  // namespace

GradientCheck finite_diff_check(const ScalarFunction& f, const Tensor& x, double step, double floor) {
  Tensor analytic;
  {
    Graph graph;
    Var leaf = graph.leaf(x, true);
    graph.backward(f(graph, leaf));
    analytic = leaf.grad();
  }

  GradientCheck result;
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + step;
    const double up = evaluate(f, probe);
    probe[i] = original - step;
    const double down = evaluate(f, probe);
    probe[i] = original;

    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    if (rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_index = i;
    }
  }
  return result;
}

}  // namespace blindguard
