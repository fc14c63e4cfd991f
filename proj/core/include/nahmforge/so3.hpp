#pragma once

#include "nahmforge/common.hpp"

#include <map>
#include <vector>

namespace nahmforge {

/// Images of the standard so(3) basis under a representation:
/// [Y_i, Y_j] = sum_k eps_ijk Y_k, each Y_i traceless anti-Hermitian.
struct GeneratorTriple {
    std::array<Mat, 3> y;
    Eigen::Index dim() const { return y[0].rows(); }
    Mat& operator[](int i) { return y[static_cast<size_t>(i)]; }
    const Mat& operator[](int i) const { return y[static_cast<size_t>(i)]; }
};

/// Multiset of irreducible dimensions {n -> multiplicity}.
using RepDecomposition = std::map<int, int>;

/// The dimension-n irreducible triple. Basis fixed by:
/// Y3 = i*diag(s, s-1, ..., -s) with s = (n-1)/2, Y2 real antisymmetric with
/// non-negative superdiagonal, Y1 = i * (symmetric ladder part).
/// Casimir -sum Y_i^2 = ((n^2-1)/4) * Id. n = 1 gives the zero triple.
GeneratorTriple irrep_generators(int n);

/// Block-diagonal direct sum; parts must be nonempty.
GeneratorTriple direct_sum(const std::vector<GeneratorTriple>& parts);

/// Max Frobenius norm of [Y_i, Y_j] - sum_k eps_ijk Y_k over i < j.
double check_homomorphism(const GeneratorTriple& t);

/// Casimir matrix -sum Y_i^2.
Mat casimir(const GeneratorTriple& t);

/// Decompose a (numerically extracted) generator triple into irreducibles by
/// clustering Casimir eigenvalues around (m^2-1)/4. Accepts triples satisfying
/// the commutator relations up to `comm_tol` with either orientation (a triple
/// T with [T_i,T_j] = -sum eps T_k decomposes identically to -T).
RepDecomposition decompose_rep(const GeneratorTriple& t, double comm_tol = 1e-6,
                               double cluster_tol = 1e-4);

int rep_dimension(const RepDecomposition& d);

std::string format_decomposition(const RepDecomposition& d);

}  // namespace nahmforge
