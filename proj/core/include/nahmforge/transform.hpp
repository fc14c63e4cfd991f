#pragma once

#include "nahmforge/common.hpp"
#include "nahmforge/nahm.hpp"
#include "nahmforge/ode.hpp"
#include "nahmforge/quadrature.hpp"
#include "nahmforge/spherical.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nahmforge {

/// Data of one Nahm-Dirac operator: a solution on (-1,1) with simple poles at
/// both ends, evaluated at a point of R^3. Quaternion action fixed as
/// e_a = -i sigma_a (so e_i e_j = -delta_ij + sum eps_ijk e_k).
struct DiracProblem {
    NahmSolution solution;
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Index n() const { return solution.dim(); }
    double r() const { return x.norm(); }
};

DiracProblem make_dirac_problem(const NahmSolution& s, const Eigen::Vector3d& x);
DiracProblem make_dirac_problem(const NahmSolution& s, double r);

const Mat& pauli(int a);

/// Coefficient K(t) of the first-order system u' = K(t) u equivalent to
/// (Lambda_x)^* u = 0 (adjoint = true) or Lambda_x f = 0 (adjoint = false).
Mat dirac_coefficient(const DiracProblem& p, double t, bool adjoint = true);

/// Local (Frobenius) data at a simple-pole endpoint: exponents lambda of
/// solutions u ~ (1 -+ t)^lambda and the square-integrable subspace lambda > -1/2.
struct IndicialData {
    RealVec exponents;             // all 2N, ascending
    RealVec admissible_exponents;  // the lambda > -1/2 subset (matching columns below)
    Mat admissible;                // eigenvector per admissible exponent
    Mat first_order;               // first-order Frobenius correction per column
};

IndicialData indicial_data(const DiracProblem& p, int endpoint, bool adjoint = true);

/// dim(admissible at +1) + dim(admissible at -1) - 2N for the adjoint problem.
int expected_cokernel_rank(const DiracProblem& p);

struct CokernelOptions {
    double tol = 1e-6;        // SVD match threshold (relative singular value)
    double eps = 1e-6;        // boundary offset of the shooting start
    double gap = 1e-4;        // smallest allowed unmatched relative singular value
    int quad_order = 10;      // Gauss order per graded panel
    double rel_tol = 1e-10;   // shooting tolerances
    double abs_tol = 1e-12;
};

/// L2-orthonormal basis of coker(Lambda_x) = ker(Lambda_x^*), grid-sampled on a
/// pole-graded quadrature over (-1+eps, 1-eps).
class CokernelBasis {
public:
    double r = 0;
    int count = 0;
    Quadrature quad;
    std::vector<Mat> node_values;  // per node: 2N x count, orthonormalized
    Mat gram;                      // count x count, == Id within quadrature error
    Mat t_pairing;                 // <u_j, t u_k> in the orthonormal basis (Hermitian)
    RealVec match_sigmas;          // relative singular values of the matching problem

    Mat values_at(double t) const;
    Mat derivative_at(double t) const;

    /// Max over sample nodes of ||u' - K(t) u|| / ||u||.
    double adjoint_residual(const DiracProblem& p, int probe_count = 40) const;

private:
    friend CokernelBasis solve_cokernel(const DiracProblem&, const CokernelOptions&);
    ComplexTrajectory left_, right_;
    Mat left_coeff_, right_coeff_;  // raw trajectory columns -> orthonormal basis
};

/// Shoot the admissible Frobenius subspaces from both poles to t = 0, match by
/// SVD, orthonormalize in L2. Throws RankMismatchError / NonConvergentError.
CokernelBasis solve_cokernel(const DiracProblem& p, const CokernelOptions& opts = {});

struct HiggsSample {
    double r = 0;
    RealVec eigenvalues;  // ascending, i factored out (Phi = i diag(...))
    double normsq = 0;    // |Phi|^2 = sum of eigenvalue^2
    double energy = std::numeric_limits<double>::quiet_NaN();  // filled by sweeps
};

HiggsSample higgs(const CokernelBasis& basis);

/// Full pipeline at one point.
HiggsSample higgs_at(const NahmSolution& s, const Eigen::Vector3d& x,
                     const CokernelOptions& opts = {});

/// Appendix closed forms, evaluated with the dominant exponential factored out.
/// Supported: the 3+1 family and the 4+2 family ((n+2)+n at n = 2).
struct HiggsReference {
    double f = 0, g = 0;
};
HiggsReference reference_higgs(const ClosedFormFamily& fam, double r);

/// Reference eigenvalue set (ascending): {+-F, +-G} for 3+1; the traceless part of
/// diag(F(r), G(r), 1 - F(r) - F(-r) - G(r) - G(-r), F(-r), G(-r)) for 4+2.
RealVec reference_eigenvalues(const ClosedFormFamily& fam, double r);

bool has_reference(const ClosedFormFamily& fam);

struct SweepRow {
    double r = 0;
    HiggsSample sample;
    double ref_f = std::numeric_limits<double>::quiet_NaN();
    double ref_g = std::numeric_limits<double>::quiet_NaN();
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
};

struct TailFit {
    double constant = 0, slope = 0;  // y ~ constant + slope / r
};

struct SweepReport {
    ClosedFormFamily family;
    int expected_rank = 0;
    std::vector<SweepRow> rows;
    bool rank_constant = true;
    double max_rel_err = std::numeric_limits<double>::quiet_NaN();
    TailFit tail_high;  // largest eigenvalue
    TailFit tail_low;   // smallest eigenvalue
};

/// Transform the family across the radius grid (optionally in parallel), compare
/// against the appendix references where they exist, and fill the radial energy
/// density (1/2) Laplacian |Phi|^2 by finite differences on the grid.
SweepReport profile_sweep(const ClosedFormFamily& fam, const std::vector<double>& r_grid,
                          int threads = 0, const CokernelOptions& opts = {});

std::vector<double> log_grid(double lo, double hi, int count);

/// Least-squares fit y = c0 + c1/r over the trailing `count` rows.
TailFit fit_tail(const std::vector<double>& r, const std::vector<double>& y, int count);

}  // namespace nahmforge
