#include "nahmforge/transform.hpp"

#include "nahmforge/linalg.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace nahmforge {

namespace {

Mat kron_n2(const Mat& a, const Mat& b) {
    // a is N x N, b is 2 x 2; index = (n-index)*2 + spin-index.
    const Eigen::Index n = a.rows();
    Mat out(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    return out;
}

Mat residue_pairing(const NahmTriple& res) {
    const Eigen::Index n = res.dim();
    Mat m = Mat::Zero(2 * n, 2 * n);
    for (int a = 0; a < 3; ++a) m += kron_n2(I * res[a], pauli(a));
    return 0.5 * (m + Mat(m.adjoint()));
}

Mat point_term(Eigen::Index n, const Eigen::Vector3d& x) {
    Mat m = Mat::Zero(2 * n, 2 * n);
    Mat id = Mat::Identity(n, n);
    for (int a = 0; a < 3; ++a) m += x(a) * kron_n2(id, pauli(a));
    return m;
}

NahmTriple endpoint_residue(const NahmSolution& s, int endpoint) {
    return residue_at(s, static_cast<double>(endpoint),
                      endpoint > 0 ? PoleSide::left : PoleSide::right);
}

struct ShootData {
    ComplexTrajectory traj;
    IndicialData ind;
    RealVec scales;  // column norms at t = 0
    Mat at_zero;     // normalized columns
};

Mat unflatten(const Vec& v, Eigen::Index rows) {
    return Eigen::Map<const Mat>(v.data(), rows, v.size() / rows);
}

ShootData shoot_from(const DiracProblem& p, int endpoint, const CokernelOptions& opts) {
    ShootData sd;
    sd.ind = indicial_data(p, endpoint, true);
    const Eigen::Index two_n = 2 * p.n();
    const Eigen::Index d = sd.ind.admissible.cols();
    Mat init = sd.ind.admissible + opts.eps * sd.ind.first_order;

    ComplexOdeRhs rhs = [&p, two_n](double t, const Vec& y, Vec& dy) {
        Mat k = dirac_coefficient(p, t, true);
        Eigen::Map<const Mat> ym(y.data(), two_n, y.size() / two_n);
        Mat out = k * ym;
        dy = Eigen::Map<const Vec>(out.data(), y.size());
    };

    double t0 = endpoint > 0 ? 1.0 - opts.eps : -1.0 + opts.eps;
    OdeOptions oo;
    oo.rel_tol = opts.rel_tol;
    oo.abs_tol = opts.abs_tol;
    Vec y0 = Eigen::Map<const Vec>(init.data(), init.size());
    auto out = integrate_adaptive_complex(rhs, t0, y0, 0.0, oo);
    if (out.singular_at)
        throw NonConvergentError("solve_cokernel: shooting integration became singular");
    sd.traj = std::move(out.trajectory);

    Mat z = unflatten(sd.traj.eval(0.0), two_n);
    sd.scales = RealVec(d);
    sd.at_zero = Mat(two_n, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        sd.scales(c) = z.col(c).norm();
        if (sd.scales(c) <= 0)
            throw NonConvergentError("solve_cokernel: a shot column vanished at t = 0");
        sd.at_zero.col(c) = z.col(c) / sd.scales(c);
    }
    return sd;
}

// Leading near-pole contribution of the omitted [0, eps] strip: columns behave as
// (s/eps)^lambda_i (v_i + s w_i) there.
Mat tail_matrix(const IndicialData& ind, double eps) {
    const Eigen::Index d = ind.admissible.cols();
    Mat tail(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double lam = ind.admissible_exponents(i) + ind.admissible_exponents(j);
            Complex vv = ind.admissible.col(i).dot(ind.admissible.col(j));
            Complex vw = ind.admissible.col(i).dot(ind.first_order.col(j)) +
                         ind.first_order.col(i).dot(ind.admissible.col(j));
            tail(i, j) = eps * (vv / (lam + 1.0) + eps * vw / (lam + 2.0));
        }
    return tail;
}

}  // namespace

const Mat& pauli(int a) {
    static const std::array<Mat, 3> sigma = [] {
        std::array<Mat, 3> s;
        s[0] = Mat::Zero(2, 2);
        s[0] << 0, 1, 1, 0;
        s[1] = Mat::Zero(2, 2);
        s[1] << 0, -I, I, 0;
        s[2] = Mat::Zero(2, 2);
        s[2] << 1, 0, 0, -1;
        return s;
    }();
    return sigma[static_cast<size_t>(a)];
}

DiracProblem make_dirac_problem(const NahmSolution& s, const Eigen::Vector3d& x) {
    auto [a, b] = s.domain();
    if (std::abs(a + 1.0) > 1e-12 || std::abs(b - 1.0) > 1e-12)
        throw Error("dirac problem: solution domain must be (-1, 1)");
    return DiracProblem{s, x};
}

DiracProblem make_dirac_problem(const NahmSolution& s, double r) {
    if (r < 0) throw Error("dirac problem: r must be >= 0");
    return make_dirac_problem(s, Eigen::Vector3d(r, 0, 0));
}

Mat dirac_coefficient(const DiracProblem& p, double t, bool adjoint) {
    NahmTriple triple = p.solution.eval(t);
    const Eigen::Index n = triple.dim();
    Mat k = Mat::Zero(2 * n, 2 * n);
    Mat id = Mat::Identity(n, n);
    for (int a = 0; a < 3; ++a)
        k += kron_n2(I * triple[a] - p.x(a) * id, pauli(a));
    return adjoint ? Mat(-k) : k;
}

IndicialData indicial_data(const DiracProblem& p, int endpoint, bool adjoint) {
    if (endpoint != 1 && endpoint != -1)
        throw DomainError("indicial_data: endpoint must be +1 or -1");
    NahmTriple res_here = endpoint_residue(p.solution, endpoint);
    NahmTriple res_other = endpoint_residue(p.solution, -endpoint);
    Mat m_here = residue_pairing(res_here);
    Mat m_other = residue_pairing(res_other);
    Mat x_term = point_term(p.n(), p.x);

    auto eig = hermitian_eigen(m_here);
    const Eigen::Index two_n = 2 * p.n();

    IndicialData ind;
    ind.exponents = RealVec(two_n);
    std::vector<Eigen::Index> order(static_cast<size_t>(two_n));
    for (Eigen::Index i = 0; i < two_n; ++i) {
        ind.exponents(i) = adjoint ? -eig.eigenvalues(i) : eig.eigenvalues(i);
        order[static_cast<size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return ind.exponents(a) < ind.exponents(b); });

    std::vector<Eigen::Index> adm;
    for (Eigen::Index k : order)
        if (ind.exponents(k) > -0.25) adm.push_back(k);

    RealVec sorted = ind.exponents;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    ind.exponents = sorted;

    ind.admissible = Mat(two_n, static_cast<Eigen::Index>(adm.size()));
    ind.admissible_exponents = RealVec(static_cast<Eigen::Index>(adm.size()));
    ind.first_order = Mat(two_n, static_cast<Eigen::Index>(adm.size()));

    // First-order Frobenius term: the analytic part of the coefficient at the pole.
    // Profiles are (a t + b)/(t^2 - 1), so the analytic part at one endpoint is the
    // opposite endpoint's residue pairing over 2.
    Mat g = endpoint > 0 ? Mat(0.5 * m_other - x_term) : Mat(0.5 * m_other + x_term);
    for (size_t c = 0; c < adm.size(); ++c) {
        Eigen::Index k = adm[c];
        double lam = adjoint ? -eig.eigenvalues(k) : eig.eigenvalues(k);
        Vec v = eig.unitary.col(k);
        Mat lhs = adjoint ? Mat(m_here + (lam + 1.0) * Mat::Identity(two_n, two_n))
                          : Mat(m_here - (lam + 1.0) * Mat::Identity(two_n, two_n));
        Vec w = lhs.completeOrthogonalDecomposition().solve(Vec(g * v));
        ind.admissible.col(static_cast<Eigen::Index>(c)) = v;
        ind.admissible_exponents(static_cast<Eigen::Index>(c)) = lam;
        ind.first_order.col(static_cast<Eigen::Index>(c)) = w;
    }
    return ind;
}

int expected_cokernel_rank(const DiracProblem& p) {
    IndicialData plus = indicial_data(p, 1, true);
    IndicialData minus = indicial_data(p, -1, true);
    return static_cast<int>(plus.admissible.cols() + minus.admissible.cols() - 2 * p.n());
}

Mat CokernelBasis::values_at(double t) const {
    const Eigen::Index two_n = left_coeff_.rows() > 0 ? node_values.front().rows() : 0;
    if (t <= 0) return unflatten(left_.eval(t), two_n) * left_coeff_;
    return unflatten(right_.eval(t), two_n) * right_coeff_;
}

Mat CokernelBasis::derivative_at(double t) const {
    const Eigen::Index two_n = node_values.front().rows();
    if (t <= 0) return unflatten(left_.eval_derivative(t), two_n) * left_coeff_;
    return unflatten(right_.eval_derivative(t), two_n) * right_coeff_;
}

double CokernelBasis::adjoint_residual(const DiracProblem& p, int probe_count) const {
    // Integral-form defect per unit time over probe panels:
    //   || u(b) - u(a) - int_a^b K(t) u(t) dt || / ((b - a) max ||u||).
    // This measures how well the stored functions solve the equation without
    // being limited by the interpolant's derivative order.
    double worst = 0.0;
    for (int i = 0; i < probe_count; ++i) {
        double a = -0.9 + 1.8 * i / probe_count;
        double b = -0.9 + 1.8 * (i + 1) / probe_count;
        if (a < 0 && b > 0) continue;  // skip the matching seam
        Quadrature q = gauss_legendre(a, b, 12);
        Mat integral = Mat::Zero(values_at(a).rows(), count);
        for (size_t k = 0; k < q.size(); ++k)
            integral += q.weights[k] *
                        (dirac_coefficient(p, q.nodes[k], true) * values_at(q.nodes[k]));
        Mat defect = values_at(b) - values_at(a) - integral;
        for (Eigen::Index c = 0; c < defect.cols(); ++c) {
            double scale = std::max(values_at(a).col(c).norm(), values_at(b).col(c).norm());
            if (scale > 0) worst = std::max(worst, defect.col(c).norm() / ((b - a) * scale));
        }
    }
    return worst;
}

CokernelBasis solve_cokernel(const DiracProblem& p, const CokernelOptions& opts) {
    const Eigen::Index two_n = 2 * p.n();
    ShootData left = shoot_from(p, -1, opts);
    ShootData right = shoot_from(p, 1, opts);
    const Eigen::Index dl = left.at_zero.cols(), dr = right.at_zero.cols();
    const int expected = static_cast<int>(dl + dr - two_n);
    if (expected <= 0)
        throw RankMismatchError("solve_cokernel: admissible subspaces cannot intersect");

    Mat stacked(two_n, dl + dr);
    stacked.leftCols(dl) = left.at_zero;
    stacked.rightCols(dr) = -right.at_zero;
    Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const Eigen::Index excess = dl + dr - sv.size();

    int tiny = 0;
    double smallest_kept = 1.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        double rel = sv(i) / smax;
        if (rel < opts.tol)
            ++tiny;
        else
            smallest_kept = std::min(smallest_kept, rel);
    }
    const int matched = static_cast<int>(excess) + tiny;
    if (matched != expected)
        throw RankMismatchError("solve_cokernel: matched " + std::to_string(matched) +
                                " solutions, expected " + std::to_string(expected));
    if (smallest_kept < opts.gap)
        throw NonConvergentError("solve_cokernel: matching SVD gap " +
                                 std::to_string(smallest_kept) + " below " +
                                 std::to_string(opts.gap));

    CokernelBasis basis;
    basis.r = p.r();
    basis.count = matched;
    basis.match_sigmas = RealVec(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) basis.match_sigmas(i) = sv(i) / smax;

    // Null vectors: (a; b) with L a = R b. Map back to raw trajectory columns.
    Mat null_vecs = svd.matrixV().rightCols(matched);
    Mat a_raw = null_vecs.topRows(dl);
    Mat b_raw = null_vecs.bottomRows(dr);
    for (Eigen::Index i = 0; i < dl; ++i) a_raw.row(i) /= left.scales(i);
    for (Eigen::Index i = 0; i < dr; ++i) b_raw.row(i) /= right.scales(i);

    // Pole-graded quadrature over the resolved interval.
    auto breaks = graded_breakpoints(-1.0 + opts.eps, 1.0 - opts.eps, opts.eps, 2.0);
    basis.quad = composite_gauss(breaks, opts.quad_order);
    const size_t nodes = basis.quad.size();

    std::vector<Mat> raw_values(nodes);
    Mat gram = Mat::Zero(matched, matched);
    Mat pair_t = Mat::Zero(matched, matched);
    for (size_t k = 0; k < nodes; ++k) {
        double t = basis.quad.nodes[k];
        Mat f = t <= 0 ? Mat(unflatten(left.traj.eval(t), two_n) * a_raw)
                       : Mat(unflatten(right.traj.eval(t), two_n) * b_raw);
        raw_values[k] = f;
        Mat ff = f.adjoint() * f;
        gram += basis.quad.weights[k] * ff;
        pair_t += basis.quad.weights[k] * t * ff;
    }
    // Analytic near-pole strips.
    Mat tl = a_raw.adjoint() * tail_matrix(left.ind, opts.eps) * a_raw;
    Mat tr = b_raw.adjoint() * tail_matrix(right.ind, opts.eps) * b_raw;
    gram += tl + tr;
    pair_t += tr - tl;  // t = +-1 at the strips to O(eps^2)

    gram = 0.5 * (gram + Mat(gram.adjoint()));
    auto geig = hermitian_eigen(gram);
    if (geig.eigenvalues.minCoeff() <= 0)
        throw NonConvergentError("solve_cokernel: matched functions are linearly dependent");
    RealVec inv_sqrt = geig.eigenvalues.array().rsqrt();
    Mat c = geig.unitary * inv_sqrt.asDiagonal() * geig.unitary.adjoint();

    basis.left_coeff_ = a_raw * c;
    basis.right_coeff_ = b_raw * c;
    basis.left_ = std::move(left.traj);
    basis.right_ = std::move(right.traj);
    basis.node_values.resize(nodes);
    for (size_t k = 0; k < nodes; ++k) basis.node_values[k] = raw_values[k] * c;
    basis.gram = c.adjoint() * gram * c;
    Mat pt = c.adjoint() * pair_t * c;
    basis.t_pairing = 0.5 * (pt + Mat(pt.adjoint()));
    return basis;
}

HiggsSample higgs(const CokernelBasis& basis) {
    const int m = basis.count;
    // Viewing C^2 as H by right quaternion multiplication reverses the product
    // orientation (e1 e2 = -e3) and flips the Higgs field by a global sign; the
    // published profiles use that orientation, so the pairing enters negated here.
    Mat phi = -basis.t_pairing;
    Complex tr = phi.trace();
    phi -= (tr / static_cast<double>(m)) * Mat::Identity(m, m);
    auto eig = hermitian_eigen(phi);
    HiggsSample s;
    s.r = basis.r;
    s.eigenvalues = eig.eigenvalues;
    s.normsq = eig.eigenvalues.squaredNorm();
    return s;
}

HiggsSample higgs_at(const NahmSolution& s, const Eigen::Vector3d& x,
                     const CokernelOptions& opts) {
    DiracProblem p = make_dirac_problem(s, x);
    return higgs(solve_cokernel(p, opts));
}

// ---------------------------------------------------------------------------
// Appendix reference curves

namespace {

// The closed-form profiles are ratios of exp-polynomial combinations whose
// numerators/denominators vanish to high order at r = 0 (up to r^11), so a
// floating evaluation of the printed formulas loses most of its digits for
// small r. Near zero we evaluate the Taylor series of the e^(-12r)-normalized
// combination instead; each combination is entire with modest coefficients.
struct ExpPolyTerm {
    int rate;                     // e^(rate * r)
    std::vector<double> poly;     // coefficients, ascending powers
};

class ExpPolyCombo {
public:
    ExpPolyCombo(std::vector<ExpPolyTerm> terms, int vanish_order)
        : terms_(std::move(terms)) {
        // c_k = sum_m sum_j p_{m,j} rate_m^{k-j} / (k-j)!; the sub-order
        // coefficients are exact zeros, so drop their rounding residue.
        series_.assign(kOrder, 0.0L);
        for (const auto& term : terms_) {
            long double pw = 1.0L;  // rate^d / d!
            for (int d = 0; d + static_cast<int>(term.poly.size()) <= kOrder; ++d) {
                for (size_t j = 0; j < term.poly.size(); ++j)
                    series_[d + j] += pw * static_cast<long double>(term.poly[j]);
                pw *= static_cast<long double>(term.rate) / (d + 1);
            }
        }
        for (int k = 0; k < vanish_order && k < kOrder; ++k) series_[static_cast<size_t>(k)] = 0.0L;
    }

    // Value of sum_m e^((rate_m - shift) r) P_m(r); series covers |shift*r| <~ 6.
    double eval(double r, int shift) const {
        if (std::abs(r) < 0.5) {
            long double acc = 0.0L;
            for (int k = kOrder - 1; k >= 0; --k)
                acc = acc * static_cast<long double>(r) + series_[static_cast<size_t>(k)];
            return static_cast<double>(acc);
        }
        long double acc = 0.0L;
        for (const auto& term : terms_) {
            long double p = 0.0L;
            for (size_t j = term.poly.size(); j-- > 0;)
                p = p * static_cast<long double>(r) + static_cast<long double>(term.poly[j]);
            acc += std::exp(static_cast<long double>(term.rate - shift) * r) * p;
        }
        return static_cast<double>(acc);
    }

private:
    static constexpr int kOrder = 56;
    std::vector<ExpPolyTerm> terms_;
    std::vector<long double> series_;
};

std::vector<double> neg_arg(std::vector<double> p) {
    for (size_t j = 1; j < p.size(); j += 2) p[j] = -p[j];
    return p;
}

std::vector<double> scale_poly(std::vector<double> p, double s) {
    for (auto& c : p) c *= s;
    return p;
}

const std::vector<double> q31_1{3, -6, 4}, q31_2{0, -2, 4}, q31_3{1, -6, 4},
    q31_4{-3, 6, 36, -32, 64}, q31_5{0, -6, 4, -32, 64};

double ref31_f(double r) {
    // (e^{4r} p1(r) - p1(-r)) / (e^{4r} p2(r) + p2(-r)), normalized by e^{-2r}.
    static const ExpPolyCombo num({{2, q31_1}, {-2, scale_poly(neg_arg(q31_1), -1)}}, 5);
    static const ExpPolyCombo den({{2, q31_2}, {-2, neg_arg(q31_2)}}, 4);
    double d = den.eval(r, 0);
    if (d == 0) return 0.0;  // exact limit at r = 0
    return num.eval(r, 0) / d;
}

double ref31_g(double r) {
    static const ExpPolyCombo num(
        {{6, q31_3}, {2, q31_4}, {-2, scale_poly(neg_arg(q31_4), -1)},
         {-6, scale_poly(neg_arg(q31_3), -1)}},
        9);
    static const ExpPolyCombo den(
        {{6, scale_poly(q31_2, -1)}, {2, q31_5}, {-2, neg_arg(q31_5)},
         {-6, scale_poly(neg_arg(q31_2), -1)}},
        8);
    double d = den.eval(r, 0);
    if (d == 0) return 0.0;
    return num.eval(r, 0) / d;
}

const std::vector<double> q42_1{-6, 15, -16, 8}, q42_2{6, 9, 4}, q42_3{0, 3, -8, 8},
    q42_4{0, 3, 4}, q42_5{-3, 27, -112, 224, -192, 64},
    q42_6{-9, 45, -84, -80, 256, -64, 256}, q42_7{9, -9, -24, 112, 128, 128},
    q42_8{3, 9, 4}, q42_9{0, 3, -32, 96, -128, 64}, q42_10{0, -9, 60, -48, 64, -192, 256},
    q42_11{0, -9, 24, 48, 128, 128};

double ref42_f(double r) {
    if (r == 0) return 0.2;  // limit: both sides vanish to order r^5
    // (e^{4r} p1 + p2) / (e^{4r} p3 - p4), normalized by e^{-2r}.
    static const ExpPolyCombo num({{2, q42_1}, {-2, q42_2}}, 5);
    static const ExpPolyCombo den({{2, q42_3}, {-2, scale_poly(q42_4, -1)}}, 5);
    return num.eval(r, 0) / den.eval(r, 0);
}

double ref42_g(double r) {
    if (r == 0) return 0.2;  // limit: both sides vanish to order r^11
    static const ExpPolyCombo num(
        {{6, q42_5}, {2, scale_poly(q42_6, -1)}, {-2, scale_poly(q42_7, -1)}, {-6, q42_8}}, 11);
    static const ExpPolyCombo den(
        {{6, q42_9}, {2, q42_10}, {-2, scale_poly(q42_11, -1)}, {-6, scale_poly(q42_4, -1)}},
        11);
    return num.eval(r, 0) / den.eval(r, 0);
}

}  // namespace

bool has_reference(const ClosedFormFamily& fam) {
    return fam.tag == Family::three_plus_one ||
           (fam.tag == Family::n_plus_2_plus_n && fam.n == 2);
}

HiggsReference reference_higgs(const ClosedFormFamily& fam, double r) {
    if (fam.tag == Family::three_plus_one) return {ref31_f(r), ref31_g(r)};
    if (fam.tag == Family::n_plus_2_plus_n && fam.n == 2) return {ref42_f(r), ref42_g(r)};
    throw Error("reference_higgs: no closed-form reference for " + fam.name());
}

RealVec reference_eigenvalues(const ClosedFormFamily& fam, double r) {
    if (fam.tag == Family::three_plus_one) {
        double f = ref31_f(r), g = ref31_g(r);
        RealVec v(4);
        v << f, g, -f, -g;
        std::sort(v.data(), v.data() + 4);
        return v;
    }
    if (fam.tag == Family::n_plus_2_plus_n && fam.n == 2) {
        double fp = ref42_f(r), gp = ref42_g(r), fm = ref42_f(-r), gm = ref42_g(-r);
        RealVec v(5);
        v << fp, gp, 1.0 - (fp + fm + gp + gm), fm, gm;
        v.array() -= v.mean();
        std::sort(v.data(), v.data() + 5);
        return v;
    }
    throw Error("reference_eigenvalues: no closed-form reference for " + fam.name());
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0) || !(hi > lo) || count < 2) throw Error("log_grid: bad parameters");
    std::vector<double> g(static_cast<size_t>(count));
    double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < count; ++i)
        g[static_cast<size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (count - 1.0));
    return g;
}

TailFit fit_tail(const std::vector<double>& r, const std::vector<double>& y, int count) {
    size_t n = r.size();
    size_t use = std::min<size_t>(static_cast<size_t>(count), n);
    // Fit c0 + c1/r + c2/r^2 + c3/r^3; the higher terms absorb the expansion
    // remainder so (c0, c1) come out unbiased over a finite tail window.
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    for (size_t i = n - use; i < n; ++i) {
        double x = 1.0 / r[i];
        Eigen::Vector4d row(1.0, x, x * x, x * x * x);
        a += row * row.transpose();
        b += y[i] * row;
    }
    Eigen::Vector4d sol = a.ldlt().solve(b);
    TailFit fit;
    fit.constant = sol(0);
    fit.slope = sol(1);
    return fit;
}

namespace {

// Fornberg finite-difference weights for derivatives 0..max_order at x0.
RealMat fd_weights(double x0, const std::vector<double>& x, int max_order) {
    const int n = static_cast<int>(x.size());
    RealMat c = RealMat::Zero(n, max_order + 1);
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, max_order);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[static_cast<size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
                c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
            c(j, 0) = c4 * c(j, 0) / c3;
        }
        c1 = c2;
    }
    return c;
}

int resolve_threads(int requested, size_t jobs) {
    int base = requested > 0 ? requested
                             : static_cast<int>(std::thread::hardware_concurrency());
    if (base < 1) base = 1;
    if (const char* env = std::getenv("NAHM_FORGE_THREADS")) {
        int bound = std::atoi(env);
        if (bound >= 1) base = std::min(base, bound);
    }
    return static_cast<int>(std::min<size_t>(static_cast<size_t>(base), jobs));
}

}  // namespace

SweepReport profile_sweep(const ClosedFormFamily& fam, const std::vector<double>& r_grid,
                          int threads, const CokernelOptions& opts) {
    SweepReport report;
    report.family = fam;
    NahmSolution sol = closed_form_solution(fam);
    report.expected_rank = fam.monopole_rank();
    report.rows.resize(r_grid.size());

    const bool with_ref = has_reference(fam);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= r_grid.size()) break;
            SweepRow& row = report.rows[i];
            row.r = r_grid[i];
            try {
                row.sample = higgs_at(sol, Eigen::Vector3d(row.r, 0, 0), opts);
                row.ok = true;
                if (with_ref) {
                    HiggsReference ref = reference_higgs(fam, row.r);
                    row.ref_f = ref.f;
                    row.ref_g = ref.g;
                    RealVec expect = reference_eigenvalues(fam, row.r);
                    double scale = expect.cwiseAbs().maxCoeff();
                    row.rel_err =
                        (row.sample.eigenvalues - expect).cwiseAbs().maxCoeff() / scale;
                }
            } catch (const Error& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };
    int nthreads = resolve_threads(threads, r_grid.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    report.rank_constant = true;
    double max_err = 0.0;
    bool any_err = false;
    for (const auto& row : report.rows) {
        if (!row.ok || row.sample.eigenvalues.size() != report.expected_rank)
            report.rank_constant = false;
        if (row.ok && with_ref) {
            max_err = std::max(max_err, row.rel_err);
            any_err = true;
        }
    }
    if (any_err) report.max_rel_err = max_err;

    // Radial energy density (1/2) r^-2 d/dr (r^2 d/dr) |Phi|^2, differentiated in
    // xi = ln r: (1/2) (f'' + f') / r^2 with 5-point stencils.
    const size_t n = report.rows.size();
    if (n >= 5) {
        std::vector<double> xi(n);
        for (size_t i = 0; i < n; ++i) xi[i] = std::log(report.rows[i].r);
        for (size_t i = 0; i < n; ++i) {
            size_t lo = i >= 2 ? i - 2 : 0;
            if (lo + 5 > n) lo = n - 5;
            bool window_ok = true;
            std::vector<double> xs(5);
            double fs[5];
            for (size_t k = 0; k < 5; ++k) {
                const auto& row = report.rows[lo + k];
                if (!row.ok) window_ok = false;
                xs[k] = xi[lo + k];
                fs[k] = row.sample.normsq;
            }
            if (!window_ok || !report.rows[i].ok) continue;
            RealMat w = fd_weights(xi[i], xs, 2);
            double d1 = 0, d2 = 0;
            for (size_t k = 0; k < 5; ++k) {
                d1 += w(static_cast<Eigen::Index>(k), 1) * fs[k];
                d2 += w(static_cast<Eigen::Index>(k), 2) * fs[k];
            }
            double r = report.rows[i].r;
            report.rows[i].sample.energy = 0.5 * (d2 + d1) / (r * r);
        }
    }

    // Tail fits for the asymptotic charge readout.
    std::vector<double> rs, hi, lo_ev;
    for (const auto& row : report.rows)
        if (row.ok) {
            rs.push_back(row.r);
            hi.push_back(row.sample.eigenvalues(row.sample.eigenvalues.size() - 1));
            lo_ev.push_back(row.sample.eigenvalues(0));
        }
    if (rs.size() >= 3) {
        report.tail_high = fit_tail(rs, hi, 10);
        report.tail_low = fit_tail(rs, lo_ev, 10);
    }
    return report;
}

}  // namespace nahmforge
