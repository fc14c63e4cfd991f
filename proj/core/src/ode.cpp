#include "nahmforge/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nahmforge {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool finite(const RealVec& v) { return v.allFinite(); }

}  // namespace

struct Dopri5 {
    static OdeOutcome run(const OdeRhs& rhs, double t0, const RealVec& y0, double t1,
                          const OdeOptions& opts) {
        OdeOutcome out;
        Trajectory& traj = out.trajectory;
        traj.forward_ = t1 > t0;
        const double dir = traj.forward_ ? 1.0 : -1.0;

        const Eigen::Index n = y0.size();
        RealVec y = y0, ynew(n), yerr(n), ysti(n);
        RealVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

        double t = t0;
        rhs(t, y, k1);
        if (!finite(k1)) throw Error("ode: non-finite derivative at the initial point");

        traj.grid_.push_back(t);
        traj.states_.push_back(y);

        double h = opts.initial_step != 0.0 ? std::abs(opts.initial_step)
                                            : initial_step(rhs, t, y, k1, t1, opts);
        h = std::min(h, std::abs(t1 - t0));
        h *= dir;

        const double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
        long steps = 0;
        bool last = false;

        while (true) {
            if (std::abs(t - t1) <= 1e-14 * std::max(1.0, std::abs(t1))) break;
            if ((t1 - t) * dir <= 0) break;
            if (++steps > opts.max_steps) throw Error("ode: max step count exceeded");

            if (std::abs(h) >= std::abs(t1 - t)) {
                h = t1 - t;
                last = true;
            } else {
                last = false;
            }

            const double hmin = 16.0 * std::numeric_limits<double>::epsilon() *
                                std::max(std::abs(t), 1e-4);
            if (std::abs(h) < hmin) {
                out.singular_at = t;
                break;
            }

            rhs(t + c2 * h, y + h * (a21 * k1), k2);
            rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
            rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
            rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
            ysti = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + h, ysti, k6);
            ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            rhs(t + h, ynew, k7);

            bool ok = finite(ynew) && finite(k7);
            double err = std::numeric_limits<double>::infinity();
            if (ok) {
                yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
                double sum = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    double sc = opts.abs_tol +
                                opts.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                    double q = yerr(i) / sc;
                    sum += q * q;
                }
                err = std::sqrt(sum / static_cast<double>(n));
            }

            if (ok && err <= 1.0) {
                Trajectory::Segment seg;
                seg.t0 = t;
                seg.h = h;
                RealVec ydiff = ynew - y;
                RealVec bspl = h * k1 - ydiff;
                seg.rcont[0] = y;
                seg.rcont[1] = ydiff;
                seg.rcont[2] = bspl;
                seg.rcont[3] = ydiff - h * k7 - bspl;
                seg.rcont[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                traj.segments_.push_back(std::move(seg));

                t += h;
                y.swap(ynew);
                k1.swap(k7);  // FSAL
                traj.grid_.push_back(t);
                traj.states_.push_back(y);

                if (opts.norm_cap > 0.0 && y.lpNorm<Eigen::Infinity>() > opts.norm_cap) {
                    out.singular_at = t;
                    break;
                }
                if (last) break;

                double fac = safety * std::pow(std::max(err, 1e-16), -0.2);
                h *= std::clamp(fac, fac_min, fac_max);
            } else {
                double fac = ok ? std::max(safety * std::pow(err, -0.2), fac_min) : 0.25;
                h *= fac;
            }
        }

        if (!traj.forward_) {
            std::reverse(traj.grid_.begin(), traj.grid_.end());
            std::reverse(traj.states_.begin(), traj.states_.end());
            std::reverse(traj.segments_.begin(), traj.segments_.end());
        }
        return out;
    }

    static double initial_step(const OdeRhs& rhs, double t0, const RealVec& y0, const RealVec& f0,
                               double t1, const OdeOptions& opts) {
        // Hairer's starting-step heuristic, order 5.
        const Eigen::Index n = y0.size();
        double d0 = 0, d1n = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sc = opts.abs_tol + opts.rel_tol * std::abs(y0(i));
            d0 += std::pow(y0(i) / sc, 2);
            d1n += std::pow(f0(i) / sc, 2);
        }
        d0 = std::sqrt(d0 / n);
        d1n = std::sqrt(d1n / n);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, std::abs(t1 - t0));

        double dir = t1 > t0 ? 1.0 : -1.0;
        RealVec y1 = y0 + dir * h0 * f0, f1(n);
        rhs(t0 + dir * h0, y1, f1);
        double d2 = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sc = opts.abs_tol + opts.rel_tol * std::abs(y0(i));
            d2 += std::pow((f1(i) - f0(i)) / sc, 2);
        }
        d2 = std::sqrt(d2 / n) / h0;
        double dmax = std::max(d1n, d2);
        double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        return std::min({100 * h0, h1, std::abs(t1 - t0)});
    }
};

OdeOutcome integrate_adaptive(const OdeRhs& rhs, double t0, const RealVec& y0, double t1,
                              const OdeOptions& opts) {
    if (t0 == t1) throw Error("ode: empty integration interval");
    return Dopri5::run(rhs, t0, y0, t1, opts);
}

Trajectory ode_integrate(const OdeRhs& rhs, double t0, const RealVec& y0, double t1,
                         double rel_tol, double abs_tol) {
    OdeOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    auto out = integrate_adaptive(rhs, t0, y0, t1, opts);
    if (out.singular_at) throw SingularError(*out.singular_at);
    return std::move(out.trajectory);
}

const Trajectory::Segment& Trajectory::segment_at(double t) const {
    if (segments_.empty()) throw Error("trajectory: empty");
    double lo = grid_.front(), hi = grid_.back();
    double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (t < lo - pad || t > hi + pad)
        throw Error("trajectory: evaluation outside [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
    // grid_ is strictly increasing; segment i covers [grid_[i], grid_[i+1]].
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    Eigen::Index idx = std::distance(grid_.begin(), it) - 1;
    idx = std::clamp<Eigen::Index>(idx, 0, static_cast<Eigen::Index>(segments_.size()) - 1);
    return segments_[static_cast<size_t>(idx)];
}

RealVec Trajectory::eval(double t) const {
    const Segment& s = segment_at(t);
    double theta = (t - s.t0) / s.h;
    double theta1 = 1.0 - theta;
    return s.rcont[0] +
           theta * (s.rcont[1] + theta1 * (s.rcont[2] + theta * (s.rcont[3] + theta1 * s.rcont[4])));
}

RealVec Trajectory::eval_derivative(double t) const {
    const Segment& s = segment_at(t);
    double theta = (t - s.t0) / s.h;
    double theta1 = 1.0 - theta;
    RealVec p = s.rcont[1] + theta1 * (s.rcont[2] + theta * (s.rcont[3] + theta1 * s.rcont[4]));
    RealVec dp = -(s.rcont[2] + theta * (s.rcont[3] + theta1 * s.rcont[4])) +
                 theta1 * (s.rcont[3] + (theta1 - 2.0 * theta) * s.rcont[4]);
    return (p + theta * dp) / s.h;
}

RealVec complex_to_real(const Vec& z) {
    return Eigen::Map<const RealVec>(reinterpret_cast<const double*>(z.data()), 2 * z.size());
}

Vec real_to_complex(const RealVec& y) {
    return Eigen::Map<const Vec>(reinterpret_cast<const Complex*>(y.data()), y.size() / 2);
}

Vec ComplexTrajectory::eval(double t) const { return real_to_complex(traj_.eval(t)); }

Vec ComplexTrajectory::eval_derivative(double t) const {
    return real_to_complex(traj_.eval_derivative(t));
}

ComplexOdeOutcome integrate_adaptive_complex(const ComplexOdeRhs& rhs, double t0, const Vec& y0,
                                             double t1, const OdeOptions& opts) {
    Eigen::Index n = y0.size();
    Vec zy(n), zdy(n);
    OdeRhs real_rhs = [&](double t, const RealVec& y, RealVec& dy) {
        Eigen::Map<const Vec> zmap(reinterpret_cast<const Complex*>(y.data()), n);
        zy = zmap;
        rhs(t, zy, zdy);
        dy = Eigen::Map<const RealVec>(reinterpret_cast<const double*>(zdy.data()), 2 * n);
    };
    auto out = integrate_adaptive(real_rhs, t0, complex_to_real(y0), t1, opts);
    return {ComplexTrajectory(std::move(out.trajectory)), out.singular_at};
}

}  // namespace nahmforge
