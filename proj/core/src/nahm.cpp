#include "nahmforge/nahm.hpp"

#include <algorithm>
#include <cmath>

namespace nahmforge {

NahmTriple operator+(const NahmTriple& a, const NahmTriple& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
NahmTriple operator-(const NahmTriple& a, const NahmTriple& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
NahmTriple operator*(double s, const NahmTriple& a) { return {s * a[0], s * a[1], s * a[2]}; }
NahmTriple operator-(const NahmTriple& a) { return {-a[0], -a[1], -a[2]}; }

double anti_hermitian_defect(const NahmTriple& t) {
    return std::max({anti_hermitian_defect(t[0]), anti_hermitian_defect(t[1]),
                     anti_hermitian_defect(t[2])});
}

double traceless_defect(const NahmTriple& t) {
    return std::max(
        {traceless_defect(t[0]), traceless_defect(t[1]), traceless_defect(t[2])});
}

NahmTriple nahm_rhs(const NahmTriple& t) {
    return {commutator(t[1], t[2]), commutator(t[2], t[0]), commutator(t[0], t[1])};
}

ConservedSet conserved(const NahmTriple& t) {
    auto rtr = [](const Mat& m) { return m.trace().real(); };
    double t11 = (t[0] * t[0]).trace().real();
    double t22 = (t[1] * t[1]).trace().real();
    double t33 = (t[2] * t[2]).trace().real();
    ConservedSet c;
    c.c1 = rtr(t[1] * t[2]);
    c.c2 = rtr(t[2] * t[0]);
    c.c3 = rtr(t[0] * t[1]);
    c.c4 = t11 - t22;
    c.c5 = t11 - t33;
    double third = (t11 + t22 + t33) / 3.0;
    c.cmatrix << t11 - third, c.c3, c.c2,
                 c.c3, t22 - third, c.c1,
                 c.c2, c.c1, t33 - third;
    return c;
}

std::array<Complex, 5> spectral_coeffs(const NahmTriple& t) {
    ConservedSet c = conserved(t);
    return {Complex(c.c4, 2 * c.c3), Complex(4 * c.c1, -4 * c.c2),
            Complex(4 * c.c5 - 2 * c.c4, 0), Complex(-4 * c.c1, -4 * c.c2),
            Complex(c.c4, -2 * c.c3)};
}

std::array<Complex, 5> spectral_coeffs_direct(const NahmTriple& t) {
    Mat s = t[0] + I * t[1];
    Mat sb = t[0] - I * t[1];
    Mat m = -2.0 * I * t[2];
    return {(s * s).trace(), (s * m + m * s).trace(), (s * sb + sb * s + m * m).trace(),
            (m * sb + sb * m).trace(), (sb * sb).trace()};
}

namespace {

void require_rotation(const Eigen::Matrix3d& a, bool special) {
    double orth = (a.transpose() * a - Eigen::Matrix3d::Identity()).norm();
    if (orth > 1e-10) throw NotRotationError("act: matrix is not orthogonal");
    if (special && std::abs(a.determinant() - 1.0) > 1e-10)
        throw NotRotationError("act: determinant is not +1");
}

void require_unitary(const Mat& u) {
    double defect = (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).norm();
    if (defect > 1e-10) throw NotUnitaryError("act: matrix is not unitary");
}

NahmTriple apply_action(const NahmTriple& t, const Eigen::Matrix3d& a, const Mat& u) {
    NahmTriple out(t.dim());
    for (int i = 0; i < 3; ++i) {
        Mat acc = Mat::Zero(t.dim(), t.dim());
        for (int j = 0; j < 3; ++j) acc += a(i, j) * t[j];
        out[i] = u * acc * u.adjoint();
    }
    return out;
}

}  // namespace

NahmTriple act(const NahmTriple& t, const Eigen::Matrix3d& a, const Mat& u) {
    require_rotation(a, true);
    require_unitary(u);
    if (std::abs(u.determinant() - Complex(1.0, 0.0)) > 1e-8)
        throw NotUnitaryError("act: determinant is not +1");
    return apply_action(t, a, u);
}

NahmTriple act_orthogonal(const NahmTriple& t, const Eigen::Matrix3d& a, const Mat& u) {
    require_rotation(a, false);
    require_unitary(u);
    return apply_action(t, a, u);
}

// ---------------------------------------------------------------------------
// Solutions

namespace {

struct ClosedFormImpl : NahmSolution::Impl {
    std::function<NahmTriple(double)> f, df;
    std::function<NahmTriple(double)> res;

    NahmTriple eval(double t) const override { return f(t); }
    NahmTriple eval_derivative(double t) const override { return df(t); }
    std::optional<NahmTriple> analytic_residue(double endpoint) const override {
        if (std::abs(endpoint - dom_a) < 1e-12 || std::abs(endpoint - dom_b) < 1e-12)
            return res(endpoint);
        return std::nullopt;
    }
};

struct NumericImpl : NahmSolution::Impl {
    std::vector<double> grid;
    std::vector<NahmTriple> samples;
    std::vector<NahmTriple> derivs;  // nahm_rhs at the nodes

    const std::vector<double>* sample_grid() const override { return &grid; }

    size_t locate(double t) const {
        if (t < grid.front() - 1e-12 || t > grid.back() + 1e-12)
            throw Error("numeric solution: evaluation outside the stored range");
        auto it = std::upper_bound(grid.begin(), grid.end(), t);
        size_t i = static_cast<size_t>(std::distance(grid.begin(), it));
        if (i == 0) return 0;
        if (i >= grid.size()) return grid.size() - 2;
        return i - 1;
    }

    NahmTriple eval(double t) const override {
        size_t i = locate(t);
        double h = grid[i + 1] - grid[i];
        double s = (t - grid[i]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        double h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s);
        double h11 = s * s * (s - 1);
        NahmTriple out(dim);
        for (int c = 0; c < 3; ++c)
            out[c] = h00 * samples[i][c] + (h10 * h) * derivs[i][c] + h01 * samples[i + 1][c] +
                     (h11 * h) * derivs[i + 1][c];
        return out;
    }

    NahmTriple eval_derivative(double t) const override {
        size_t i = locate(t);
        double h = grid[i + 1] - grid[i];
        double s = (t - grid[i]) / h;
        double d00 = 6 * s * (s - 1) / h;
        double d10 = (1 - s) * (1 - 3 * s);
        double d01 = -d00;
        double d11 = s * (3 * s - 2);
        NahmTriple out(dim);
        for (int c = 0; c < 3; ++c)
            out[c] = d00 * samples[i][c] + d10 * derivs[i][c] + d01 * samples[i + 1][c] +
                     d11 * derivs[i + 1][c];
        return out;
    }
};

struct TransformedImpl : NahmSolution::Impl {
    NahmSolution base;
    // t -> scale * T(affine_a * t + affine_b), then rotation/gauge.
    double affine_a = 1.0, affine_b = 0.0;
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    Mat gauge;  // empty = identity

    NahmTriple map_triple(const NahmTriple& t) const {
        NahmTriple out(t.dim());
        for (int i = 0; i < 3; ++i) {
            Mat acc = Mat::Zero(t.dim(), t.dim());
            for (int j = 0; j < 3; ++j) acc += rot(i, j) * t[j];
            out[i] = gauge.size() ? Mat(gauge * acc * gauge.adjoint()) : acc;
        }
        return out;
    }

    NahmTriple eval(double t) const override {
        return map_triple(affine_a * base.eval(affine_a * t + affine_b));
    }
    NahmTriple eval_derivative(double t) const override {
        return map_triple(affine_a * affine_a * base.eval_derivative(affine_a * t + affine_b));
    }
    std::optional<NahmTriple> analytic_residue(double endpoint) const override {
        // Residues are invariant under affine pull-back; only the endpoint moves.
        auto r = base.analytic_residue(affine_a * endpoint + affine_b);
        if (!r) return std::nullopt;
        return map_triple(*r);
    }
};

std::shared_ptr<TransformedImpl> wrap(const NahmSolution& s) {
    auto impl = std::make_shared<TransformedImpl>();
    impl->base = s;
    impl->kind = s.kind();
    impl->dim = s.dim();
    auto [a, b] = s.domain();
    impl->dom_a = a;
    impl->dom_b = b;
    impl->meta = s.meta();
    return impl;
}

}  // namespace

NahmSolution NahmSolution::conjugated(const Mat& u) const {
    require_unitary(u);
    auto impl = wrap(*this);
    impl->gauge = u;
    return NahmSolution(impl);
}

NahmSolution NahmSolution::rotated(const Eigen::Matrix3d& a) const {
    require_rotation(a, true);
    auto impl = wrap(*this);
    impl->rot = a;
    return NahmSolution(impl);
}

NahmSolution affine_pullback(const NahmSolution& s, double a, double b) {
    if (a == 0.0) throw Error("affine_pullback: a must be nonzero");
    auto impl = wrap(s);
    impl->affine_a = a;
    impl->affine_b = b;
    auto [lo, hi] = s.domain();
    double p = (lo - b) / a, q = (hi - b) / a;
    impl->dom_a = std::min(p, q);
    impl->dom_b = std::max(p, q);
    return NahmSolution(impl);
}

NahmSolution make_closed_form_solution(Eigen::Index dim, double dom_a, double dom_b,
                                       std::function<NahmTriple(double)> eval,
                                       std::function<NahmTriple(double)> deriv,
                                       std::function<NahmTriple(double)> residue,
                                       SolutionMeta meta) {
    auto impl = std::make_shared<ClosedFormImpl>();
    impl->kind = SolutionKind::closed_form;
    impl->dim = dim;
    impl->dom_a = dom_a;
    impl->dom_b = dom_b;
    impl->f = std::move(eval);
    impl->df = std::move(deriv);
    impl->res = std::move(residue);
    impl->meta = std::move(meta);
    return NahmSolution(impl);
}

NahmSolution make_numeric_solution(std::vector<double> grid, std::vector<NahmTriple> samples) {
    if (grid.size() != samples.size() || grid.size() < 2)
        throw Error("make_numeric_solution: grid/sample mismatch");
    for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (grid[i + 1] <= grid[i]) throw Error("make_numeric_solution: grid not increasing");
    auto impl = std::make_shared<NumericImpl>();
    impl->kind = SolutionKind::numeric;
    impl->dim = samples.front().dim();
    impl->dom_a = grid.front();
    impl->dom_b = grid.back();
    impl->derivs.reserve(samples.size());
    for (const auto& s : samples) impl->derivs.push_back(nahm_rhs(s));
    impl->grid = std::move(grid);
    impl->samples = std::move(samples);
    return NahmSolution(impl);
}

std::vector<double> interior_grid(const NahmSolution& s, int points, double margin) {
    auto [a, b] = s.domain();
    double w = b - a;
    double lo = a + margin * w, hi = b - margin * w;
    std::vector<double> g(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<size_t>(i)] = lo + (hi - lo) * i / (points - 1.0);
    return g;
}

double nahm_residual(const NahmSolution& s, const std::vector<double>& grid) {
    double worst = 0.0;
    for (double t : grid) {
        NahmTriple diff = s.eval_derivative(t) - nahm_rhs(s.eval(t));
        worst = std::max(worst, diff.max_component_norm());
    }
    return worst;
}

NahmTriple residue_at(const NahmSolution& s, double endpoint, PoleSide side) {
    if (auto r = s.analytic_residue(endpoint)) return *r;

    const double inward = (side == PoleSide::left) ? -1.0 : 1.0;
    constexpr int ladder = 7;
    constexpr double eps0 = 1e-2;
    std::vector<NahmTriple> v;
    v.reserve(ladder);
    for (int k = 0; k < ladder; ++k) {
        double eps = eps0 * std::pow(2.0, -k);
        double t = endpoint + inward * eps;
        NahmTriple sample = s.eval(t);
        v.push_back((t - endpoint) * sample);
    }
    double n0 = v.front().norm(), n_end = v.back().norm();
    if (!(n_end > 0.3 * n0) || !(n_end < 3.0 * n0) || n_end == 0.0)
        throw NotSimplePoleError("residue_at: (t - t0) T(t) is not settling to a constant");

    // One Richardson level removes the O(eps) analytic part; convergence of the
    // extrapolants at rate ~1/4 certifies a simple pole.
    std::vector<NahmTriple> w;
    for (int k = 0; k + 1 < ladder; ++k) w.push_back(2.0 * v[k + 1] - 1.0 * v[k]);
    double prev = (w[1] - w[0]).norm();
    for (size_t k = 1; k + 1 < w.size(); ++k) {
        double cur = (w[k + 1] - w[k]).norm();
        double scale = std::max(1e-14, w[k].norm());
        if (cur > 0.6 * prev && cur > 1e-9 * scale)
            throw NotSimplePoleError("residue_at: Richardson ladder not converging at first order");
        prev = cur;
    }
    // Second level for the O(eps^2) tail.
    size_t last = w.size() - 1;
    return (1.0 / 3.0) * (4.0 * w[last] - 1.0 * w[last - 1]);
}

RepDecomposition pole_representation(const NahmSolution& s, double endpoint, PoleSide side) {
    NahmTriple r = residue_at(s, endpoint, side);
    GeneratorTriple g{{r[0], r[1], r[2]}};
    return decompose_rep(g);
}

RealVec triple_to_state(const NahmTriple& t) {
    Eigen::Index n = t.dim();
    RealVec y(6 * n * n);
    for (int c = 0; c < 3; ++c) {
        Eigen::Map<RealVec> block(y.data() + 2 * c * n * n, 2 * n * n);
        block = Eigen::Map<const RealVec>(reinterpret_cast<const double*>(t[c].data()),
                                          2 * n * n);
    }
    return y;
}

NahmTriple state_to_triple(const RealVec& y, Eigen::Index n) {
    NahmTriple t(n);
    for (int c = 0; c < 3; ++c)
        t[c] = Eigen::Map<const Mat>(
            reinterpret_cast<const Complex*>(y.data() + 2 * c * n * n), n, n);
    return t;
}

std::optional<double> estimate_pole_location(const FlowResult& flow) {
    if (!flow.singular_at || flow.grid.size() < 8) return std::nullopt;
    const bool forward = flow.grid.back() > flow.grid.front();
    const size_t n = flow.grid.size();

    // Trailing window (nearest the blow-up), inverse norms.
    std::vector<double> ts, ys;
    const size_t window = std::min<size_t>(48, n);
    for (size_t k = n - window; k < n; ++k) {
        size_t idx = forward ? k : n - 1 - k;
        double norm = flow.samples[idx].norm();
        if (norm < 1e2) continue;  // keep only the pole zone
        ts.push_back(flow.grid[idx]);
        ys.push_back(1.0 / norm);
    }
    if (ts.size() < 5) return std::nullopt;

    double t_end = ts.back();
    double dir = forward ? 1.0 : -1.0;
    double span = std::abs(ts.front() - ts.back());

    // y ~ c1*(t0 - t) + c2*(t0 - t)^2 near the pole; linear LS in (c1, c2) for
    // fixed t0, golden-section on the pole offset.
    auto sse = [&](double delta) {
        double t0 = t_end + dir * delta;
        double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
        for (size_t i = 0; i < ts.size(); ++i) {
            double s = std::abs(t0 - ts[i]);
            double s2 = s * s;
            s11 += s2;
            s12 += s * s2;
            s22 += s2 * s2;
            b1 += s * ys[i];
            b2 += s2 * ys[i];
        }
        double det = s11 * s22 - s12 * s12;
        double c1 = (s22 * b1 - s12 * b2) / det;
        double c2 = (s11 * b2 - s12 * b1) / det;
        double acc = 0;
        for (size_t i = 0; i < ts.size(); ++i) {
            double s = std::abs(t0 - ts[i]);
            double r = ys[i] - c1 * s - c2 * s * s;
            acc += r * r;
        }
        return acc;
    };

    double lo = ys.back() * 1e-3, hi = std::max(4.0 * span, 16.0 * ys.back());
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = sse(x1), f2 = sse(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = sse(x2);
        }
        if (b - a < 1e-14 * std::max(1.0, std::abs(t_end))) break;
    }
    return t_end + dir * 0.5 * (a + b);
}

FlowResult integrate_nahm(const NahmTriple& seed, double t0, double t1, const FlowOptions& opts) {
    const Eigen::Index n = seed.dim();
    OdeRhs rhs = [n](double, const RealVec& y, RealVec& dy) {
        dy = triple_to_state(nahm_rhs(state_to_triple(y, n)));
    };
    OdeOptions oo;
    oo.rel_tol = opts.rel_tol;
    oo.abs_tol = opts.abs_tol;
    oo.norm_cap = opts.norm_cap;
    auto out = integrate_adaptive(rhs, t0, triple_to_state(seed), t1, oo);

    FlowResult res;
    res.singular_at = out.singular_at;
    res.grid = out.trajectory.grid();
    res.samples.reserve(res.grid.size());
    for (const auto& y : out.trajectory.states()) res.samples.push_back(state_to_triple(y, n));
    return res;
}

}  // namespace nahmforge
