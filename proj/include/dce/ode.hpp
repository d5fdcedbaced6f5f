#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the 4th-order continuous
// extension, sampling the solution exactly at a prescribed output grid.
//
// State is any Eigen dense type (real or complex). The right-hand side is
// called as rhs(t, y, dydt) and must fully overwrite dydt.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>

#include "dce/types.hpp"

namespace dce::ode {

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 0.0;  // 0 selects the step automatically
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

namespace detail {

// Tableau (Hairer, Norsett & Wanner, Solving ODEs I, Table 5.2).
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (dopri5 contd5).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class State>
double scaled_rms(const State& err, const State& y0, const State& y1, double rtol, double atol) {
    const auto scale = atol + rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
    return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
}

}  // namespace detail

struct NoPostStep {
    template <class State>
    void operator()(State&) const {}
};

// Integrates from times.front() to times.back(), calling
// observe(index, t, y) once per output time (index 0 is the initial state).
// post_step(y) may modify the accepted state in place (e.g. projections).
// Throws IntegrationFailure on step-size underflow or step-count exhaustion.
template <class State, class Rhs, class Observer, class PostStep = NoPostStep>
Stats integrate_dense(Rhs&& rhs, State y, std::span<const double> times, const Options& opt,
                      Observer&& observe, PostStep&& post_step = {}) {
    using namespace detail;
    Stats stats;
    if (times.empty()) return stats;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw InvalidArgument("output times must be strictly increasing");
    }

    double t = times.front();
    const double t_end = times.back();
    observe(std::size_t{0}, t, static_cast<const State&>(y));
    if (times.size() == 1) return stats;

    State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
    State r2 = y, r3 = y, r4 = y, r5 = y;
    rhs(t, y, k1);
    ++stats.rhs_evals;

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic, first-order variant.
        const State zero = State::Zero(y.rows(), y.cols());
        const double d0 = scaled_rms(y, y, zero, opt.rel_tol, opt.abs_tol);
        const double d1n = scaled_rms(k1, y, zero, opt.rel_tol, opt.abs_tol);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min(h, t_end - t);
    }
    h = std::min(h, opt.max_step);

    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0;
    std::size_t next_out = 1;

    while (next_out < times.size()) {
        if (stats.accepted + stats.rejected >= opt.max_steps) {
            throw IntegrationFailure("maximum number of integrator steps exceeded", t);
        }
        const double min_h = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < min_h) throw IntegrationFailure("step size underflow", t);
        bool last = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }

        ytmp = y + h * a21 * k1;
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, ynew, k7);
        stats.rhs_evals += 6;

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err_norm = scaled_rms(err, y, ynew, opt.rel_tol, opt.abs_tol);

        if (!std::isfinite(err_norm)) {
            ++stats.rejected;
            h *= fac_min;
            continue;
        }
        if (err_norm > 1.0) {
            ++stats.rejected;
            h *= std::max(fac_min, safety * std::pow(err_norm, -0.2));
            continue;
        }

        const double t_new = last ? t_end : t + h;
        bool have_dense = false;
        while (next_out < times.size() && times[next_out] <= t_new) {
            if (times[next_out] == t_new) {
                observe(next_out, times[next_out], static_cast<const State&>(ynew));
            } else {
                if (!have_dense) {
                    r2 = ynew - y;
                    r3 = h * k1 - r2;
                    r4 = r2 - h * k7 - r3;
                    r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                    have_dense = true;
                }
                const double theta = (times[next_out] - t) / h;
                const double theta1 = 1.0 - theta;
                ytmp = y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
                observe(next_out, times[next_out], static_cast<const State&>(ytmp));
            }
            ++next_out;
        }

        ++stats.accepted;
        t = t_new;
        y = ynew;
        if constexpr (std::is_same_v<std::decay_t<PostStep>, NoPostStep>) {
            k1 = k7;
        } else {
            // A projection moves y off the stage the last derivative was taken at.
            post_step(y);
            rhs(t, y, k1);
            ++stats.rhs_evals;
        }

        const double fac = err_norm == 0.0 ? fac_max : std::clamp(safety * std::pow(err_norm, -0.2), fac_min, fac_max);
        h = std::min(h * fac, opt.max_step);
    }
    return stats;
}

}  // namespace dce::ode
