#pragma once

#include "nahmforge/common.hpp"

#include <vector>

namespace nahmforge {

/// Composite quadrature rule: nodes with matching weights.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule of given order on [a, b].
Quadrature gauss_legendre(double a, double b, int order);

/// Composite Gauss rule on a panel decomposition of [a, b].
Quadrature composite_gauss(const std::vector<double>& breakpoints, int order_per_panel);

/// Panels geometrically graded toward both endpoints of [a, b]; the first/last panel
/// has width `edge`, widths grow by `ratio` toward the midpoint.
std::vector<double> graded_breakpoints(double a, double b, double edge, double ratio = 2.0);

/// Complex vector function sampled on quadrature nodes; values(k) = column k.
struct SampledFunction {
    std::vector<double> grid;
    Mat values;  // rows = vector components, cols = grid points
};

/// L2 pairing  integral of f(t)^H g(t) dt  by the supplied quadrature.
/// Conjugate-symmetric by construction. Throws GridMismatchError when the grids
/// or the rule's nodes disagree.
Complex l2_inner_product(const SampledFunction& f, const SampledFunction& g,
                         const Quadrature& quad);

}  // namespace nahmforge
