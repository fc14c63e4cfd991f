#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace nahmforge {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

constexpr Complex I{0.0, 1.0};

// Levi-Civita symbol, indices in {0,1,2}.
constexpr int levi_civita(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

inline double anti_hermitian_defect(const Mat& m) {
    double scale = std::max(1.0, m.norm());
    return (m + m.adjoint()).norm() / scale;
}

inline double traceless_defect(const Mat& m) {
    double scale = std::max(1.0, m.norm());
    return std::abs(m.trace()) / scale;
}

inline bool is_anti_hermitian(const Mat& m, double tol = 1e-10) {
    return anti_hermitian_defect(m) <= tol;
}

inline bool is_traceless(const Mat& m, double tol = 1e-10) {
    return traceless_defect(m) <= tol;
}

inline bool is_hermitian(const Mat& m, double tol = 1e-10) {
    double scale = std::max(1.0, m.norm());
    return (m - m.adjoint()).norm() / scale <= tol;
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitianError : Error { using Error::Error; };
struct GridMismatchError : Error { using Error::Error; };
struct DegenerateNullSpaceError : Error { using Error::Error; };
struct NotARepresentationError : Error { using Error::Error; };
struct InconsistentCasimirError : Error { using Error::Error; };
struct NotRotationError : Error { using Error::Error; };
struct NotUnitaryError : Error { using Error::Error; };
struct NotSimplePoleError : Error { using Error::Error; };
struct ShapeMismatchError : Error { using Error::Error; };
struct GeneratorMismatchError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct SingularPointError : Error { using Error::Error; };
struct RankMismatchError : Error { using Error::Error; };
struct NonConvergentError : Error { using Error::Error; };

struct SingularError : Error {
    double t_reached;
    explicit SingularError(double t)
        : Error("integration became singular at t = " + std::to_string(t)), t_reached(t) {}
};

}  // namespace nahmforge
