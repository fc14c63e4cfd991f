#pragma once

#include "nahmforge/common.hpp"
#include "nahmforge/intertwiner.hpp"
#include "nahmforge/nahm.hpp"
#include "nahmforge/so3.hpp"

#include <vector>

namespace nahmforge {

/// Chain of irreducibles V_{n+2k} + ... + V_{n+2} + V_n (dims decreasing by 2).
struct ChainSpec {
    int n = 1;  // bottom dimension
    int k = 0;  // chain length (number of couplings)

    std::vector<int> dims() const;  // [n+2k, ..., n]
    Eigen::Index total_dim() const;
    // f_a exists for a in [f_min, k]; f_0 is absent when n = 1.
    int f_min() const { return n == 1 ? 1 : 0; }
    int f_count() const { return k + 1 - f_min(); }
};

/// Scalar profile of the chain Ansatz. f holds f_{f_min}..f_k, g holds g_0..g_{k-1}
/// (boundary convention g_{-1} = g_k = 0).
struct ChainProfile {
    std::vector<double> f;
    std::vector<double> g;
};

ChainProfile operator+(const ChainProfile& a, const ChainProfile& b);
ChainProfile operator-(const ChainProfile& a, const ChainProfile& b);
ChainProfile operator*(double s, const ChainProfile& a);
double profile_distance(const ChainProfile& a, const ChainProfile& b);

/// Max residual over the nine linearized conditions [Y_i, T_j] = sum_k eps_ijk T_k.
double check_spherical(const NahmTriple& t, const GeneratorTriple& y);

/// Generators of the chain's symmetry: direct sum of the irreducible triples.
GeneratorTriple chain_generators(const ChainSpec& spec);

/// Block-tridiagonal Ansatz: diagonal blocks f_a Y^(n+2a), couplings
/// +g_a B^(n+2a) above / -g_a (B^(n+2a))^H below the diagonal.
NahmTriple build_chain(const ChainSpec& spec, const ChainProfile& p);

/// Reduced flow of the chain profiles (equivalent to nahm_rhs through build_chain).
ChainProfile chain_rhs(const ChainSpec& spec, const ChainProfile& p);

enum class Family {
    three_plus_one,       // V3 + V1
    five_three_one,       // V5 + V3 + V1
    n_plus_2_plus_n,      // V_{n+2} + V_n, n >= 2
};

struct ClosedFormFamily {
    Family tag = Family::three_plus_one;
    int n = 1;  // only used by n_plus_2_plus_n

    ChainSpec spec() const;
    std::string name() const;
    /// Rank of the matched cokernel in the transform of this family.
    int monopole_rank() const;
};

ClosedFormFamily family_from_name(const std::string& name, int n = 2);

/// Closed-form profiles on (-1,1).
ChainProfile closed_form(const ClosedFormFamily& fam, double t);
ChainProfile closed_form_derivative(const ClosedFormFamily& fam, double t);
/// Residues of the profiles at endpoint +1 or -1.
ChainProfile closed_form_residues(const ClosedFormFamily& fam, int endpoint);

/// The family as a NahmSolution on (-1,1) with analytic residues.
NahmSolution closed_form_solution(const ClosedFormFamily& fam);

/// 1 iff the tensor product of irreps of dims m, n with the vector rep has a
/// trivial summand: m = n >= 2 or |m - n| = 2.
int trivial_summand_count(int m, int n);

/// Connected components of the chain under nonzero g-couplings (|g_a| > 1e-12);
/// blocks indexed 0..k from the largest irrep down.
std::vector<std::vector<int>> irreducible_components(const ChainSpec& spec,
                                                     const ChainProfile& p);

}  // namespace nahmforge
