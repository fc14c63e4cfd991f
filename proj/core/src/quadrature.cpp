#include "nahmforge/quadrature.hpp"

#include <cmath>

namespace nahmforge {

namespace {

// Nodes/weights on [-1, 1] by Newton iteration on Legendre polynomials.
void legendre_rule(int order, std::vector<double>& x, std::vector<double>& w) {
    x.resize(order);
    w.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
}

}  // namespace

Quadrature gauss_legendre(double a, double b, int order) {
    if (order < 1) throw Error("gauss_legendre: order must be >= 1");
    std::vector<double> x, w;
    legendre_rule(order, x, w);
    Quadrature q;
    q.nodes.resize(order);
    q.weights.resize(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
        q.nodes[i] = mid + half * x[i];
        q.weights[i] = half * w[i];
    }
    return q;
}

Quadrature composite_gauss(const std::vector<double>& breakpoints, int order_per_panel) {
    if (breakpoints.size() < 2) throw Error("composite_gauss: need at least one panel");
    Quadrature q;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Quadrature p = gauss_legendre(breakpoints[i], breakpoints[i + 1], order_per_panel);
        q.nodes.insert(q.nodes.end(), p.nodes.begin(), p.nodes.end());
        q.weights.insert(q.weights.end(), p.weights.begin(), p.weights.end());
    }
    return q;
}

std::vector<double> graded_breakpoints(double a, double b, double edge, double ratio) {
    if (!(b > a) || !(edge > 0) || !(ratio > 1))
        throw Error("graded_breakpoints: invalid parameters");
    const double mid = 0.5 * (a + b);
    std::vector<double> left{a}, right{b};
    double w = edge;
    while (left.back() + w < mid) {
        left.push_back(left.back() + w);
        w *= ratio;
    }
    w = edge;
    while (right.back() - w > mid) {
        right.push_back(right.back() - w);
        w *= ratio;
    }
    std::vector<double> pts(left);
    pts.push_back(mid);
    for (auto it = right.rbegin(); it != right.rend(); ++it) pts.push_back(*it);
    return pts;
}

Complex l2_inner_product(const SampledFunction& f, const SampledFunction& g,
                         const Quadrature& quad) {
    if (f.grid.size() != g.grid.size() || f.grid.size() != quad.size())
        throw GridMismatchError("l2_inner_product: grid sizes differ");
    if (f.grid != g.grid || f.grid != quad.nodes)
        throw GridMismatchError("l2_inner_product: grids differ");
    if (f.values.rows() != g.values.rows())
        throw GridMismatchError("l2_inner_product: component counts differ");
    Complex acc{0.0, 0.0};
    for (size_t k = 0; k < quad.size(); ++k)
        acc += quad.weights[k] * f.values.col(k).dot(g.values.col(k));
    return acc;
}

}  // namespace nahmforge
