#pragma once

#include "nahmforge/common.hpp"
#include "nahmforge/ode.hpp"
#include "nahmforge/so3.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nahmforge {

/// A triple of n x n matrices. Solutions carry anti-Hermitian traceless entries;
/// residue triples reuse the type without the traceless constraint.
struct NahmTriple {
    std::array<Mat, 3> t;
    NahmTriple() = default;
    explicit NahmTriple(Eigen::Index n) {
        for (auto& m : t) m = Mat::Zero(n, n);
    }
    NahmTriple(Mat t1, Mat t2, Mat t3) : t{std::move(t1), std::move(t2), std::move(t3)} {}
    Eigen::Index dim() const { return t[0].rows(); }
    Mat& operator[](int i) { return t[static_cast<size_t>(i)]; }
    const Mat& operator[](int i) const { return t[static_cast<size_t>(i)]; }
    double norm() const {
        return std::sqrt(t[0].squaredNorm() + t[1].squaredNorm() + t[2].squaredNorm());
    }
    double max_component_norm() const {
        return std::max({t[0].norm(), t[1].norm(), t[2].norm()});
    }
};

NahmTriple operator+(const NahmTriple& a, const NahmTriple& b);
NahmTriple operator-(const NahmTriple& a, const NahmTriple& b);
NahmTriple operator*(double s, const NahmTriple& a);
NahmTriple operator-(const NahmTriple& a);

double anti_hermitian_defect(const NahmTriple& t);
double traceless_defect(const NahmTriple& t);

/// Right-hand side of the flow: ( [T2,T3], [T3,T1], [T1,T2] ).
NahmTriple nahm_rhs(const NahmTriple& t);

struct ConservedSet {
    double c1, c2, c3, c4, c5;
    Eigen::Matrix3d cmatrix;  // real symmetric traceless
};

ConservedSet conserved(const NahmTriple& t);

/// Coefficients (zeta^0 .. zeta^4) of tr(T(zeta)^2) with
/// T(zeta) = (T1 + iT2) - 2i T3 zeta + (T1 - iT2) zeta^2.
std::array<Complex, 5> spectral_coeffs(const NahmTriple& t);

/// Same polynomial by direct expansion of the matrix square (cross-check path).
std::array<Complex, 5> spectral_coeffs_direct(const NahmTriple& t);

/// Simultaneous rotation/gauge action: first (A T)_i = sum_j A_ij T_j, then U (.) U^-1.
/// A must be in SO(3), U in SU(n).
NahmTriple act(const NahmTriple& t, const Eigen::Matrix3d& a, const Mat& u);

/// Relaxed entry: A only orthogonal (det -1 produces anti-Nahm data).
NahmTriple act_orthogonal(const NahmTriple& t, const Eigen::Matrix3d& a, const Mat& u);

enum class SolutionKind { closed_form, numeric };
enum class PoleSide { left, right };  // side of the endpoint the solution lives on

struct SolutionMeta {
    std::string family;
    std::map<std::string, double> params;
};

/// A time-parametrized Nahm triple on an open interval, closed-form or numeric.
/// Value type over an immutable implementation; cheap to copy.
class NahmSolution {
public:
    struct Impl {
        virtual ~Impl() = default;
        virtual NahmTriple eval(double t) const = 0;
        virtual NahmTriple eval_derivative(double t) const = 0;
        virtual std::optional<NahmTriple> analytic_residue(double /*endpoint*/) const {
            return std::nullopt;
        }
        virtual const std::vector<double>* sample_grid() const { return nullptr; }
        SolutionKind kind = SolutionKind::numeric;
        double dom_a = 0, dom_b = 0;
        Eigen::Index dim = 0;
        std::optional<SolutionMeta> meta;
    };

    NahmSolution() = default;
    explicit NahmSolution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    bool valid() const { return impl_ != nullptr; }
    SolutionKind kind() const { return impl_->kind; }
    Eigen::Index dim() const { return impl_->dim; }
    std::pair<double, double> domain() const { return {impl_->dom_a, impl_->dom_b}; }
    const std::optional<SolutionMeta>& meta() const { return impl_->meta; }

    NahmTriple eval(double t) const { return impl_->eval(t); }
    NahmTriple eval_derivative(double t) const { return impl_->eval_derivative(t); }
    std::optional<NahmTriple> analytic_residue(double endpoint) const {
        return impl_->analytic_residue(endpoint);
    }
    const std::vector<double>* sample_grid() const { return impl_->sample_grid(); }

    NahmSolution conjugated(const Mat& u) const;
    NahmSolution rotated(const Eigen::Matrix3d& a) const;

private:
    std::shared_ptr<const Impl> impl_;
};

NahmSolution make_closed_form_solution(Eigen::Index dim, double dom_a, double dom_b,
                                       std::function<NahmTriple(double)> eval,
                                       std::function<NahmTriple(double)> deriv,
                                       std::function<NahmTriple(double)> residue,
                                       SolutionMeta meta);

/// Numeric solution over stored samples; interpolation is cubic Hermite with node
/// derivatives supplied by the flow's right-hand side.
NahmSolution make_numeric_solution(std::vector<double> grid, std::vector<NahmTriple> samples);

/// Equispaced interior sample grid (excludes endpoints by `margin` of the width).
std::vector<double> interior_grid(const NahmSolution& s, int points, double margin = 0.05);

/// max over the grid of || dT/dt - nahm_rhs(T) || (max component Frobenius norm).
double nahm_residual(const NahmSolution& s, const std::vector<double>& grid);

/// f*(T)(t) = (a T1(at+b), a T2(at+b), a T3(at+b)) on the preimage interval.
NahmSolution affine_pullback(const NahmSolution& s, double a, double b);

/// Residue of a simple pole at a domain endpoint. Closed forms return the analytic
/// residue; numeric solutions use a geometric offset ladder eps_k = 1e-2 * 2^-k,
/// k = 0..6, with first-order Richardson extrapolation. Throws NotSimplePoleError
/// when the ladder does not converge at first order (regular point, non-simple
/// blow-up, or no data near the endpoint).
NahmTriple residue_at(const NahmSolution& s, double endpoint, PoleSide side);

RepDecomposition pole_representation(const NahmSolution& s, double endpoint, PoleSide side);

/// Flow integration of a seed triple. The state stays in su(n)^3; blow-up is
/// reported, not thrown.
struct FlowOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double norm_cap = 1e7;  // stop once ||T|| exceeds this (pole detection)
};

struct FlowResult {
    std::vector<double> grid;
    std::vector<NahmTriple> samples;
    std::optional<double> singular_at;
};

FlowResult integrate_nahm(const NahmTriple& seed, double t0, double t1,
                          const FlowOptions& opts = {});

/// Locate a simple pole just past the blown-up end of a flow by fitting
/// 1/||T(t)|| (which vanishes linearly at the pole) over the trailing samples.
/// Returns nothing when the flow did not blow up or the fit window is too short.
std::optional<double> estimate_pole_location(const FlowResult& flow);

/// Serialization state <-> triple for matrix flows (T1,T2,T3 column-major, complex).
RealVec triple_to_state(const NahmTriple& t);
NahmTriple state_to_triple(const RealVec& y, Eigen::Index n);

}  // namespace nahmforge
