#pragma once

#include "nahmforge/common.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace nahmforge {

using OdeRhs = std::function<void(double t, const RealVec& y, RealVec& dy)>;
using ComplexOdeRhs = std::function<void(double t, const Vec& y, Vec& dy)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double norm_cap = 0.0;  // 0 = unlimited; otherwise stop (Singular) when ||y||_inf exceeds it
    long max_steps = 4000000;
    double initial_step = 0.0;  // 0 = automatic
};

/// Dense-output trajectory of one adaptive integration. The interpolant is the
/// integrator's own 4th-order continuous extension, valid on [grid.front(), grid.back()].
class Trajectory {
public:
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<RealVec>& states() const { return states_; }
    Eigen::Index state_dim() const { return states_.empty() ? 0 : states_.front().size(); }
    double t_begin() const { return grid_.front(); }
    double t_end() const { return grid_.back(); }
    static constexpr int interpolation_order = 4;

    RealVec eval(double t) const;
    RealVec eval_derivative(double t) const;

private:
    friend struct Dopri5;
    struct Segment {
        double t0, h;  // step from t0 to t0+h (h may be negative)
        std::array<RealVec, 5> rcont;
    };
    std::vector<double> grid_;       // strictly increasing
    std::vector<RealVec> states_;    // one per grid point
    std::vector<Segment> segments_;  // sorted by min(t0, t0+h)
    bool forward_ = true;

    const Segment& segment_at(double t) const;
};

struct OdeOutcome {
    Trajectory trajectory;
    std::optional<double> singular_at;  // set when the step size underflowed / norm cap hit
};

/// Adaptive DOPRI5(4) with dense output. Never throws on blow-up; inspect singular_at.
OdeOutcome integrate_adaptive(const OdeRhs& rhs, double t0, const RealVec& y0, double t1,
                              const OdeOptions& opts = {});

/// Contract-level entry: throws SingularError(t_reached) if the solution blows up
/// before reaching t1.
Trajectory ode_integrate(const OdeRhs& rhs, double t0, const RealVec& y0, double t1,
                         double rel_tol = 1e-10, double abs_tol = 1e-12);

/// Complex-state view over a real trajectory of doubled dimension.
class ComplexTrajectory {
public:
    ComplexTrajectory() = default;
    explicit ComplexTrajectory(Trajectory t) : traj_(std::move(t)) {}
    const Trajectory& real_view() const { return traj_; }
    double t_begin() const { return traj_.t_begin(); }
    double t_end() const { return traj_.t_end(); }
    Vec eval(double t) const;
    Vec eval_derivative(double t) const;

private:
    Trajectory traj_;
};

RealVec complex_to_real(const Vec& z);
Vec real_to_complex(const RealVec& y);

struct ComplexOdeOutcome {
    ComplexTrajectory trajectory;
    std::optional<double> singular_at;
};

ComplexOdeOutcome integrate_adaptive_complex(const ComplexOdeRhs& rhs, double t0, const Vec& y0,
                                             double t1, const OdeOptions& opts = {});

}  // namespace nahmforge
