#include "nahmforge/axial.hpp"

#include "nahmforge/linalg.hpp"

#include <cmath>

namespace nahmforge {

double check_axial(const NahmTriple& t, const Mat& y) {
    if (t.dim() != y.rows()) throw Error("check_axial: dimension mismatch");
    double r1 = (t[0] - commutator(t[1], y)).norm();
    double r2 = (t[1] - commutator(y, t[0])).norm();
    double r3 = commutator(y, t[2]).norm();
    return std::max({r1, r2, r3});
}

std::pair<bool, std::vector<double>> ad_squared_has_minus_one(const Mat& y, double tol) {
    if (!is_anti_hermitian(y, 1e-8))
        throw Error("ad_squared_has_minus_one: generator not anti-Hermitian");
    auto eig = hermitian_eigen(-I * y, 1e-8);
    const auto& alpha = eig.eigenvalues;
    std::vector<double> spectrum;
    spectrum.reserve(static_cast<size_t>(alpha.size() * alpha.size()));
    bool found = false;
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        for (Eigen::Index j = 0; j < alpha.size(); ++j) {
            double gap = alpha(i) - alpha(j);
            double ev = -gap * gap;
            spectrum.push_back(ev);
            if (std::abs(ev + 1.0) <= tol) found = true;
        }
    std::sort(spectrum.begin(), spectrum.end());
    return {found, spectrum};
}

Mat su3_y_alpha_beta(double alpha, double beta) {
    Mat y = Mat::Zero(3, 3);
    y(0, 0) = I * alpha;
    y(1, 1) = I * beta;
    y(2, 2) = -I * (alpha + beta);
    return y;
}

int su3_minus_one_dim(double alpha, double beta) {
    if (!(alpha >= beta - 1e-12) || !(beta >= -(alpha + beta) - 1e-12))
        throw DomainError("su3_minus_one_dim: require alpha >= beta >= -(alpha+beta)");
    double gaps[3] = {alpha - beta, 2 * alpha + beta, alpha + 2 * beta};
    int dim = 0;
    for (double g : gaps)
        if (std::abs(g * g - 1.0) < 1e-9) dim += 2;  // each z-slot is complex
    return dim;
}

std::pair<Mat, Mat> axial_reduced_rhs(const Mat& t1, const Mat& t3, const Mat& y) {
    if (commutator(y, t3).norm() > 1e-10 * std::max(1.0, y.norm() * t3.norm()))
        throw GeneratorMismatchError("axial_reduced_rhs: [Y, T3] != 0");
    return {commutator(y, commutator(t1, t3)), commutator(t1, commutator(y, t1))};
}

NahmTriple su3_axial_triple(const Su3AxialState& s) {
    NahmTriple t(3);
    t[0](0, 2) = s.z;
    t[0](2, 0) = -s.z;
    t[1](0, 2) = I * s.z;
    t[1](2, 0) = I * s.z;
    t[2](0, 0) = I * s.a;
    t[2](1, 1) = -I * (s.a + s.b);
    t[2](2, 2) = I * s.b;
    return t;
}

double axial_a_profile(double K, double c, double t) {
    if (K > 0) {
        double sq = std::sqrt(K);
        double u = sq * (t - c);
        double s = std::sin(u);
        if (std::abs(s) < 1e-13) throw SingularPointError("axial A(t): on the singular set");
        return -sq * std::cos(u) / s;
    }
    if (K == 0) {
        if (std::abs(t - c) < 1e-13) throw SingularPointError("axial A(t): t = c");
        return -1.0 / (t - c);
    }
    double sq = std::sqrt(-K);
    double u = sq * (t - c);
    double s = std::sinh(u);
    if (std::abs(s) < 1e-13) throw SingularPointError("axial A(t): t = c");
    return -sq * std::cosh(u) / s;
}

double axial_singular_distance(double K, double c, double t) {
    if (K > 0) {
        double period = M_PI / std::sqrt(K);
        double d = std::remainder(t - c, period);
        return std::abs(d);
    }
    return std::abs(t - c);
}

double axial_constant_from_seed(double K, double t0, double a_value) {
    if (K > 0) {
        double sq = std::sqrt(K);
        // cot(sq (t0 - c)) = -A0/sq with sq (t0-c) in (0, pi)
        double u = M_PI / 2 - std::atan(-a_value / sq);
        return t0 - u / sq;
    }
    if (K == 0) {
        if (a_value == 0) throw Error("axial seed: A0 = 0 is stationary for K = 0");
        return t0 + 1.0 / a_value;
    }
    double sq = std::sqrt(-K);
    double x = -a_value / sq;  // coth value, |x| > 1 on the solution branch
    if (std::abs(x) <= 1.0) throw Error("axial seed: incompatible with K < 0 branch");
    double u = 0.5 * std::log((x + 1.0) / (x - 1.0));  // arcoth
    return t0 - u / sq;
}

namespace {

Su3AxialState state_at(double K, double c, double t, double k1) {
    double a_prof = axial_a_profile(K, c, t);
    Su3AxialState s;
    s.a = 0.5 * (a_prof + k1);
    s.b = k1 - s.a;
    s.z = 0.5 * std::sqrt(std::max(0.0, a_prof * a_prof + K));
    return s;
}

}  // namespace

Su3ExampleValue su3_example_solution(double K, double c, double t, double k1) {
    Su3ExampleValue v;
    v.state = state_at(K, c, t, k1);
    v.triple = su3_axial_triple(v.state);
    v.a_profile = v.state.a - v.state.b;
    return v;
}

NahmSolution axial_su3_solution(double K, double c, double k1, double span) {
    double lo = c;
    double hi = K > 0 ? c + M_PI / std::sqrt(K) : c + span;

    auto eval = [K, c, k1](double t) { return su3_example_solution(K, c, t, k1).triple; };
    auto deriv = [K, c, k1](double t) {
        // Calculus on the closed forms: A' = A^2 + K on every branch, so
        // a' = (A^2+K)/2, b' = -a', z' = A z.
        double a_prof = axial_a_profile(K, c, t);
        double da = 0.5 * (a_prof * a_prof + K);
        double z = 0.5 * std::sqrt(std::max(0.0, a_prof * a_prof + K));
        Su3AxialState ds;
        ds.a = da;
        ds.b = -da;
        ds.z = a_prof * z;
        return su3_axial_triple(ds);
    };
    auto residue = [lo, hi, K](double endpoint) {
        bool left = std::abs(endpoint - lo) < 1e-12;
        if (!left && K <= 0)
            throw NotSimplePoleError("axial solution: right endpoint is not a pole");
        // Approaching a pole from inside: Res a = -1/2, Res b = +1/2,
        // Res z = +1/2 from the right of the pole, -1/2 from the left.
        Su3AxialState rs;
        rs.a = -0.5;
        rs.b = 0.5;
        rs.z = left ? 0.5 : -0.5;
        return su3_axial_triple(rs);
    };
    SolutionMeta meta;
    meta.family = "axial-su3";
    meta.params = {{"K", K}, {"c", c}, {"k1", k1}, {"span", span}};
    return make_closed_form_solution(3, lo, hi, eval, deriv, residue, std::move(meta));
}

}  // namespace nahmforge
