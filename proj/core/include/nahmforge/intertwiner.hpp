#pragma once

#include "nahmforge/common.hpp"
#include "nahmforge/so3.hpp"

#include <map>
#include <string>

namespace nahmforge {

/// The equivariant triple B^n : V_n -> V_{n+2}, normalized so that
/// sum_i B_i B_i^H = Id_{n+2}, with the residual U(1) phase fixed by making the
/// largest-modulus entry of B_3 real positive.
struct IntertwinerTriple {
    int n = 0;
    std::array<Mat, 3> b;  // each (n+2) x n
    Mat& operator[](int i) { return b[static_cast<size_t>(i)]; }
    const Mat& operator[](int i) const { return b[static_cast<size_t>(i)]; }
};

/// Solve the equivariance equations Y_j^+ B_k - B_k Y_j^- = sum_i eps_ijk B_i for
/// the unique (up to phase) triple, then normalize. Throws DegenerateNullSpaceError
/// if the null space is not complex-1-dimensional.
IntertwinerTriple compute_intertwiner(int n);

/// Frobenius residuals of the full identity set for B^n. Keys:
///   equivariance, bbh_sum, bhb_sum, bbh_skew, bhb_skew, yb_skew, by_skew,
///   yb_sum, by_sum
std::map<std::string, double> verify_identities(const IntertwinerTriple& b);

/// Structure constants extracted from B^n by least-squares projection:
///   sum eps_ijk B_j B_k^H = alpha_plus * Y_i^+      (expected -2/(n+1))
///   sum eps_ijk B_j^H B_k = alpha_minus * Y_i^-     (expected 2(n+2)/(n(n+1)))
///   sum eps_ijk Y_j^+ B_k = beta_plus * B_i         (expected (n+3)/2)
///   sum eps_ijk B_j Y_k^- = beta_minus * B_i        (expected -(n-1)/2)
/// A coefficient whose right-hand side vanishes identically (alpha_minus at n = 1)
/// is reported as undetermined with the residual of the zero identity.
struct CoefficientFit {
    double value = 0.0;
    double residual = 0.0;  // || tilde - value * target ||
    bool determined = true;
};
struct CoefficientTable {
    CoefficientFit alpha_plus, alpha_minus, beta_plus, beta_minus;
};
CoefficientTable coefficient_table(const IntertwinerTriple& b);

/// Complex dimension of the solution space of the equivariance system between
/// irreps of dimensions m and n (1 iff m = n >= 2 or |m - n| = 2, else 0).
Eigen::Index equivariance_nullity(int m, int n);

/// The 9mn x 3mn coefficient matrix of the equivariance system for maps V_n -> V_m.
Mat equivariance_system(const GeneratorTriple& upper, const GeneratorTriple& lower);

}  // namespace nahmforge
