#pragma once

#include <span>
#include <utility>
#include <vector>

namespace fadstat {

// Immutable node/weight set ready for direct application. Rules are cheap to
// share across threads once built.
struct QuadratureRule {
  enum class Kind { finite_panel, semi_infinite };

  Kind kind = Kind::finite_panel;
  int order = 0;
  int panels = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

// Nodes/weights of the order-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_base(int order);

// Composite Gauss-Legendre rule on [a, b] split into equal panels.
QuadratureRule gauss_legendre(int order, double a, double b, int panels = 1);

// Rule for integrals over (0, inf) of integrands decaying like exp(-rate*t):
// substitution t = -ln(s)/rate on s in (0,1), "panels" equal Gauss-Legendre
// panels plus dyadic end refinement of depth "dyadic" at both endpoints.
QuadratureRule semi_infinite_rule(int order, int panels, double rate = 1.0, int dyadic = 36);

// Composite Gauss-Legendre over an explicit breakpoint list.
QuadratureRule composite_rule(int order, std::span<const double> breakpoints);

// Breakpoints for [0, b] with dyadic refinement toward 0 (handles x^(p-1)
// endpoint behaviour with p < 1) and cells of width at most max_cell elsewhere.
std::vector<double> graded_breakpoints(double b, double max_cell, int dyadic = 36);

}  // namespace fadstat
