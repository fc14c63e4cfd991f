#include <doctest.h>

#include "nahmforge/intertwiner.hpp"
#include "nahmforge/linalg.hpp"
#include "nahmforge/ode.hpp"
#include "nahmforge/quadrature.hpp"
#include "nahmforge/so3.hpp"

#include <Eigen/LU>
#include <random>

using namespace nahmforge;

namespace {

Mat random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist;
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    return m;
}

}  // namespace

TEST_CASE("hermitian_eigen basics") {
    auto id3 = hermitian_eigen(Mat::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(id3.eigenvalues(i) == doctest::Approx(1.0));

    // diag(i, -i) seen through -i * m.
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = Complex(0, 1);
    m(1, 1) = Complex(0, -1);
    auto d = hermitian_eigen(-I * m);
    CHECK(d.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(d.eigenvalues(1) == doctest::Approx(1.0));

    // Casimir of the dimension-4 irreducible: all eigenvalues 15/4.
    GeneratorTriple y = irrep_generators(4);
    auto cas = hermitian_eigen(casimir(y));
    for (int i = 0; i < 4; ++i) CHECK(cas.eigenvalues(i) == doctest::Approx(15.0 / 4).epsilon(1e-12));

    Mat bad = Mat::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eigen(bad), NotHermitianError);
}

TEST_CASE("hermitian_eigen reconstruction up to size 32") {
    std::mt19937_64 rng(7);
    for (Eigen::Index n : {2, 5, 12, 32}) {
        Mat a = random_matrix(n, n, rng);
        Mat h = 0.5 * (a + a.adjoint());
        auto e = hermitian_eigen(h);
        Mat rebuilt = e.unitary * e.eigenvalues.asDiagonal() * e.unitary.adjoint();
        CHECK((rebuilt - h).norm() / h.norm() < 1e-10);
        for (Eigen::Index i = 0; i + 1 < n; ++i) CHECK(e.eigenvalues(i) <= e.eigenvalues(i + 1));
    }
}

TEST_CASE("nullspace basics and rank-deficiency oracle") {
    CHECK(nullspace(Mat::Zero(2, 2), 1e-10).cols() == 2);
    CHECK(nullspace(Mat::Identity(3, 3), 1e-10).cols() == 0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Index n = 4 + static_cast<Eigen::Index>(rng() % 6);
        Eigen::Index m = 4 + static_cast<Eigen::Index>(rng() % 6);
        Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % std::min(n, m));
        Mat a = random_matrix(m, r, rng) * random_matrix(r, n, rng);
        Mat basis = nullspace(a, 1e-8);
        CHECK(basis.cols() == n - r);
        if (basis.cols() > 0) {
            CHECK((a * basis).norm() <= 1e-7 * a.norm());
            CHECK((basis.adjoint() * basis - Mat::Identity(basis.cols(), basis.cols())).norm() <
                  1e-12);
        }
    }
}

TEST_CASE("nullspace of the n = 2 intertwiner defining system is complex-1-dimensional") {
    // Independent assembly with raw loops; rank via full-pivot LU, not SVD.
    GeneratorTriple up = irrep_generators(4), low = irrep_generators(2);
    const int m = 4, n = 2, blk = m * n;
    Mat sys = Mat::Zero(9 * blk, 3 * blk);
    auto col_of = [&](int which, int row, int col) { return which * blk + col * m + row; };
    int eq = 0;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c) {
                    int row = eq * blk + c * m + r;
                    for (int s = 0; s < m; ++s) sys(row, col_of(k, s, c)) += up[j](r, s);
                    for (int s = 0; s < n; ++s) sys(row, col_of(k, r, s)) -= low[j](s, c);
                    for (int i = 0; i < 3; ++i)
                        if (int e = levi_civita(i, j, k); e != 0)
                            sys(row, col_of(i, r, c)) -= static_cast<double>(e);
                }
            ++eq;
        }
    Eigen::FullPivLU<Mat> lu(sys);
    lu.setThreshold(1e-8);
    CHECK(sys.cols() - lu.rank() == 1);
    CHECK(nullspace(sys, 1e-8).cols() == 1);
}

TEST_CASE("ode_integrate: constant solutions") {
    RealVec y0(3);
    y0 << 1.0, -2.0, 0.5;
    auto traj = ode_integrate([](double, const RealVec&, RealVec& dy) { dy.setZero(); }, 0.0, y0,
                              1.0);
    CHECK((traj.eval(0.7) - y0).norm() == doctest::Approx(0.0));
}

TEST_CASE("ode_integrate: y' = y^2 blows up near t = 1 (oracle 1/(1-t))") {
    RealVec y0(1);
    y0 << 1.0;
    OdeRhs rhs = [](double, const RealVec& y, RealVec& dy) { dy(0) = y(0) * y(0); };
    CHECK_THROWS_AS(ode_integrate(rhs, 0.0, y0, 1.0), SingularError);
    try {
        ode_integrate(rhs, 0.0, y0, 1.0);
    } catch (const SingularError& e) {
        CHECK(e.t_reached > 0.999);
        CHECK(e.t_reached <= 1.0);
    }
    // Against the closed form away from the pole.
    auto out = integrate_adaptive(rhs, 0.0, y0, 0.9);
    REQUIRE(!out.singular_at);
    for (double t : {0.25, 0.5, 0.85})
        CHECK(out.trajectory.eval(t)(0) == doctest::Approx(1.0 / (1.0 - t)).epsilon(1e-9));
}

TEST_CASE("ode_integrate: A' = A^2 reproduces -(t - 1)^-1") {
    // Seed on the c = 1 branch: A(-0.5) = 2/3.
    RealVec y0(1);
    y0 << 2.0 / 3.0;
    auto traj = ode_integrate([](double, const RealVec& y, RealVec& dy) { dy(0) = y(0) * y(0); },
                              -0.5, y0, 0.5);
    for (double t : {-0.3, 0.0, 0.45})
        CHECK(traj.eval(t)(0) == doctest::Approx(-1.0 / (t - 1.0)).epsilon(1e-9));
}

TEST_CASE("ode_integrate matches exp for |lambda| <= 10 within 10 rel_tol") {
    const double rel = 1e-10;
    for (double lambda : {-10.0, -3.0, -0.5, 0.7, 4.0, 10.0}) {
        RealVec y0(1);
        y0 << 1.0;
        auto traj = ode_integrate(
            [lambda](double, const RealVec& y, RealVec& dy) { dy(0) = lambda * y(0); }, 0.0, y0,
            1.0, rel, 1e-14);
        double want = std::exp(lambda);
        CHECK(std::abs(traj.eval(1.0)(0) - want) <= 10 * rel * std::abs(want));
    }
}

TEST_CASE("dense output derivative matches the rhs along the trajectory") {
    OdeRhs rhs = [](double t, const RealVec& y, RealVec& dy) {
        dy(0) = y(1);
        dy(1) = -y(0) + 0.1 * std::sin(t);
    };
    RealVec y0(2);
    y0 << 1.0, 0.0;
    auto traj = ode_integrate(rhs, 0.0, y0, 6.0, 1e-10, 1e-12);
    for (double t = 0.3; t < 6.0; t += 0.7) {
        RealVec y = traj.eval(t), dy(2), want(2);
        rhs(t, y, want);
        dy = traj.eval_derivative(t);
        CHECK((dy - want).norm() < 1e-6);
    }
}

TEST_CASE("backward integration") {
    RealVec y0(1);
    y0 << 1.0;
    auto traj = ode_integrate([](double, const RealVec& y, RealVec& dy) { dy(0) = y(0); }, 0.0,
                              y0, -1.0);
    CHECK(traj.eval(-1.0)(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(traj.grid().front() == doctest::Approx(-1.0));
}

TEST_CASE("l2_inner_product") {
    Quadrature q = composite_gauss({-1.0, 0.0, 1.0}, 6);
    SampledFunction f, g;
    f.grid = g.grid = q.nodes;
    f.values = Mat::Ones(2, static_cast<Eigen::Index>(q.size())) / std::sqrt(2.0);
    g.values = f.values;
    CHECK(l2_inner_product(f, g, q).real() == doctest::Approx(2.0).epsilon(1e-14));

    // pointwise orthogonal components
    SampledFunction h = f;
    h.values.row(0).setZero();
    h.values.row(1).setOnes();
    SampledFunction e1 = f;
    e1.values.row(0).setOnes();
    e1.values.row(1).setZero();
    CHECK(std::abs(l2_inner_product(e1, h, q)) < 1e-15);

    // odd integrand: f(t) = t against 1 on (-1,1)
    SampledFunction lin, one;
    lin.grid = one.grid = q.nodes;
    lin.values = Mat(1, static_cast<Eigen::Index>(q.size()));
    one.values = Mat::Ones(1, static_cast<Eigen::Index>(q.size()));
    for (size_t k = 0; k < q.size(); ++k) lin.values(0, static_cast<Eigen::Index>(k)) = q.nodes[k];
    CHECK(std::abs(l2_inner_product(lin, one, q)) < 1e-15);

    // conjugate symmetry is exact
    std::mt19937_64 rng(3);
    SampledFunction a, b;
    a.grid = b.grid = q.nodes;
    a.values = random_matrix(3, static_cast<Eigen::Index>(q.size()), rng);
    b.values = random_matrix(3, static_cast<Eigen::Index>(q.size()), rng);
    Complex ab = l2_inner_product(a, b, q);
    Complex ba = l2_inner_product(b, a, q);
    CHECK(ab == std::conj(ba));

    SampledFunction wrong = a;
    wrong.grid[0] += 1e-3;
    CHECK_THROWS_AS(l2_inner_product(wrong, b, q), GridMismatchError);
}

TEST_CASE("graded panels cover the interval") {
    auto pts = graded_breakpoints(-1.0 + 1e-6, 1.0 - 1e-6, 1e-6);
    CHECK(pts.front() == doctest::Approx(-1.0 + 1e-6));
    CHECK(pts.back() == doctest::Approx(1.0 - 1e-6));
    for (size_t i = 0; i + 1 < pts.size(); ++i) CHECK(pts[i] < pts[i + 1]);
    // integral of a smooth function with endpoint square-root behavior
    Quadrature q = composite_gauss(pts, 10);
    double acc = 0;
    for (size_t k = 0; k < q.size(); ++k)
        acc += q.weights[k] * std::sqrt(1.0 - q.nodes[k] * q.nodes[k]);
    CHECK(acc == doctest::Approx(M_PI / 2).epsilon(1e-8));
}
