#include "nahmforge/intertwiner.hpp"

#include "nahmforge/linalg.hpp"

#include <cmath>

namespace nahmforge {

namespace {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

}  // namespace

Mat equivariance_system(const GeneratorTriple& upper, const GeneratorTriple& lower) {
    const Eigen::Index m = upper.dim(), n = lower.dim();
    const Eigen::Index blk = m * n;
    const Mat im = Mat::Identity(m, m), in = Mat::Identity(n, n);
    Mat sys = Mat::Zero(9 * blk, 3 * blk);
    int row_block = 0;
    for (int j = 0; j < 3; ++j) {
        // Acting on vec(B_k): vec(Y_j^+ B_k) = (I (x) Y_j^+) vec(B_k),
        // vec(B_k Y_j^-) = ((Y_j^-)^T (x) I) vec(B_k).
        Mat left = kron(in, upper[j]) - kron(lower[j].transpose(), im);
        for (int k = 0; k < 3; ++k, ++row_block) {
            sys.block(row_block * blk, k * blk, blk, blk) += left;
            for (int i = 0; i < 3; ++i)
                if (int e = levi_civita(i, j, k); e != 0)
                    sys.block(row_block * blk, i * blk, blk, blk) -=
                        static_cast<double>(e) * Mat::Identity(blk, blk);
        }
    }
    return sys;
}

Eigen::Index equivariance_nullity(int m, int n) {
    Mat sys = equivariance_system(irrep_generators(m), irrep_generators(n));
    return nullspace(sys, 1e-8).cols();
}

IntertwinerTriple compute_intertwiner(int n) {
    if (n < 1) throw Error("compute_intertwiner: n must be >= 1");
    GeneratorTriple up = irrep_generators(n + 2);
    GeneratorTriple low = irrep_generators(n);
    Mat sys = equivariance_system(up, low);
    Mat null = nullspace(sys, 1e-8);
    if (null.cols() != 1)
        throw DegenerateNullSpaceError("compute_intertwiner: null space dimension " +
                                       std::to_string(null.cols()));
    const Eigen::Index m = n + 2, blk = m * n;
    IntertwinerTriple t;
    t.n = n;
    for (int i = 0; i < 3; ++i) t[i] = unvec(null.col(0).segment(i * blk, blk), m, n);

    // Scale so sum B_i B_i^H = Id (it is proportional to Id by Schur).
    Mat s = t[0] * t[0].adjoint() + t[1] * t[1].adjoint() + t[2] * t[2].adjoint();
    double c = s.trace().real() / static_cast<double>(m);
    if (c <= 0) throw DegenerateNullSpaceError("compute_intertwiner: degenerate normalization");
    double inv = 1.0 / std::sqrt(c);
    for (int i = 0; i < 3; ++i) t[i] *= inv;

    // Fix the U(1) phase: largest-modulus entry of B_3 becomes real positive.
    Eigen::Index r = 0, col = 0;
    t[2].cwiseAbs().maxCoeff(&r, &col);
    Complex z = t[2](r, col);
    Complex phase = std::abs(z) / z;
    for (int i = 0; i < 3; ++i) t[i] *= phase;
    return t;
}

std::map<std::string, double> verify_identities(const IntertwinerTriple& t) {
    const int n = t.n;
    GeneratorTriple up = irrep_generators(n + 2);
    GeneratorTriple low = irrep_generators(n);
    const Mat id_up = Mat::Identity(n + 2, n + 2);
    const Mat id_low = Mat::Identity(n, n);

    std::map<std::string, double> rep;

    double equi = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            Mat r = up[j] * t[k] - t[k] * low[j];
            for (int i = 0; i < 3; ++i)
                if (int e = levi_civita(i, j, k); e != 0) r -= static_cast<double>(e) * t[i];
            equi = std::max(equi, r.norm());
        }
    rep["equivariance"] = equi;

    Mat bbh = Mat::Zero(n + 2, n + 2), bhb = Mat::Zero(n, n);
    for (int i = 0; i < 3; ++i) {
        bbh += t[i] * t[i].adjoint();
        bhb += t[i].adjoint() * t[i];
    }
    rep["bbh_sum"] = (bbh - id_up).norm();
    rep["bhb_sum"] = (bhb - (static_cast<double>(n + 2) / n) * id_low).norm();

    double bbh_skew = 0.0, bhb_skew = 0.0, yb_skew = 0.0, by_skew = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) {
            Mat r1 = t[j] * t[k].adjoint() - t[k] * t[j].adjoint();
            Mat r2 = t[j].adjoint() * t[k] - t[k].adjoint() * t[j];
            Mat r3 = up[j] * t[k] - up[k] * t[j];
            Mat r4 = t[j] * low[k] - t[k] * low[j];
            for (int i = 0; i < 3; ++i) {
                int e = levi_civita(i, j, k);
                if (e == 0) continue;
                double ed = static_cast<double>(e);
                r1 += ed * (2.0 / (n + 1)) * up[i];
                r2 -= ed * (2.0 * (n + 2) / (static_cast<double>(n) * (n + 1))) * low[i];
                r3 -= ed * (0.5 * (n + 3)) * t[i];
                r4 += ed * (0.5 * (n - 1)) * t[i];
            }
            bbh_skew = std::max(bbh_skew, r1.norm());
            bhb_skew = std::max(bhb_skew, r2.norm());
            yb_skew = std::max(yb_skew, r3.norm());
            by_skew = std::max(by_skew, r4.norm());
        }
    rep["bbh_skew"] = bbh_skew;
    rep["bhb_skew"] = bhb_skew;
    rep["yb_skew"] = yb_skew;
    rep["by_skew"] = by_skew;

    Mat yb = Mat::Zero(n + 2, n), by = Mat::Zero(n + 2, n);
    for (int i = 0; i < 3; ++i) {
        yb += up[i] * t[i];
        by += t[i] * low[i];
    }
    rep["yb_sum"] = yb.norm();
    rep["by_sum"] = by.norm();
    return rep;
}

namespace {

CoefficientFit project(const std::array<Mat, 3>& tilde, const std::array<Mat, 3>& target) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
        num += (target[static_cast<size_t>(i)].adjoint() * tilde[static_cast<size_t>(i)])
                   .trace()
                   .real();
        den += target[static_cast<size_t>(i)].squaredNorm();
    }
    CoefficientFit fit;
    if (den < 1e-20) {
        fit.determined = false;
        fit.value = 0.0;
        double r = 0.0;
        for (const auto& m : tilde) r += m.squaredNorm();
        fit.residual = std::sqrt(r);
        return fit;
    }
    fit.value = num / den;
    double r = 0.0;
    for (int i = 0; i < 3; ++i)
        r += (tilde[static_cast<size_t>(i)] - fit.value * target[static_cast<size_t>(i)])
                 .squaredNorm();
    fit.residual = std::sqrt(r);
    return fit;
}

}  // namespace

CoefficientTable coefficient_table(const IntertwinerTriple& t) {
    const int n = t.n;
    GeneratorTriple up = irrep_generators(n + 2);
    GeneratorTriple low = irrep_generators(n);

    std::array<Mat, 3> ty_up, ty_low, tb_up, tb_low;
    for (int i = 0; i < 3; ++i) {
        ty_up[static_cast<size_t>(i)] = Mat::Zero(n + 2, n + 2);
        ty_low[static_cast<size_t>(i)] = Mat::Zero(n, n);
        tb_up[static_cast<size_t>(i)] = Mat::Zero(n + 2, n);
        tb_low[static_cast<size_t>(i)] = Mat::Zero(n + 2, n);
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                int e = levi_civita(i, j, k);
                if (e == 0) continue;
                double ed = static_cast<double>(e);
                ty_up[static_cast<size_t>(i)] += ed * t[j] * t[k].adjoint();
                ty_low[static_cast<size_t>(i)] += ed * t[j].adjoint() * t[k];
                tb_up[static_cast<size_t>(i)] += ed * up[j] * t[k];
                tb_low[static_cast<size_t>(i)] += ed * t[j] * low[k];
            }
    }
    CoefficientTable table;
    table.alpha_plus = project(ty_up, up.y);
    table.alpha_minus = project(ty_low, low.y);
    table.beta_plus = project(tb_up, t.b);
    table.beta_minus = project(tb_low, t.b);
    return table;
}

}  // namespace nahmforge
