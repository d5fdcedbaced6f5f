#pragma once

// Closed two-moment system for n = <a^dagger a> and s = <(a^dagger)^2 + a^2>:
//
//   dn/dt = 2 xi s - gamma n
//   ds/dt = 8 xi n - (2 Gamma + gamma) s + 4 xi
//
// together with its exact solution, growth threshold, steady state and the
// fast-dephasing limit. Phase damping drops out of dn/dt because it
// dissipates no energy.

#include <cmath>
#include <optional>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "dce/model.hpp"
#include "dce/types.hpp"

namespace dce {

class InvalidRegime : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct MomentState {
    double n = 0.0;
    double s = 0.0;
};

struct MomentSeries {
    std::vector<double> times;
    std::vector<double> n;
    std::vector<double> s;
};

// Relative gap |R - (Gamma + gamma)| below which analytic_n hands over to the
// matrix exponential; the cancellation in the closed form costs roughly one
// digit per decade of gap.
inline constexpr double kDegeneracyGap = 1e-6;

inline MomentState moment_rhs(const MomentState& m, const ModelParams& p) {
    const double xi = p.squeeze_rate, g = p.decay_rate, G = p.dephasing_rate;
    return {2.0 * xi * m.s - g * m.n, 8.0 * xi * m.n - (2.0 * G + g) * m.s + 4.0 * xi};
}

// Exact propagation of the linear system through the augmented generator
// [[A, b], [0, 0]], one output interval at a time. Accepts any (n0, s0).
inline MomentSeries integrate_moments(const MomentState& m0, const ModelParams& p) {
    if (p.times.empty() || p.times.front() != 0.0) throw InvalidArgument("moment time grid must start at 0");
    const double xi = p.squeeze_rate, g = p.decay_rate, G = p.dephasing_rate;
    Eigen::Matrix3d gen;
    gen << -g, 2.0 * xi, 0.0,
           8.0 * xi, -(2.0 * G + g), 4.0 * xi,
           0.0, 0.0, 0.0;

    MomentSeries out;
    out.times = p.times;
    out.n.reserve(p.times.size());
    out.s.reserve(p.times.size());
    Eigen::Vector3d x(m0.n, m0.s, 1.0);
    out.n.push_back(x(0));
    out.s.push_back(x(1));

    double cached_dt = -1.0;
    Eigen::Matrix3d step;
    for (std::size_t i = 1; i < p.times.size(); ++i) {
        const double dt = p.times[i] - p.times[i - 1];
        if (!(dt > 0.0)) throw InvalidArgument("moment time grid must be strictly increasing");
        if (dt != cached_dt) {
            step = (gen * dt).exp();
            cached_dt = dt;
        }
        x = step * x;
        out.n.push_back(x(0));
        out.s.push_back(x(1));
    }
    return out;
}

inline MomentState integrate_moments_at(double t, const MomentState& m0, const ModelParams& p) {
    ModelParams q = p;
    q.times = t > 0.0 ? std::vector<double>{0.0, t} : std::vector<double>{0.0};
    const MomentSeries s = integrate_moments(m0, q);
    return {s.n.back(), s.s.back()};
}

namespace detail {

struct ClosedForm {
    double root;    // R = sqrt(Gamma^2 + 16 xi^2)
    double growth;  // R - Gamma - gamma
    double decay;   // R + Gamma + gamma
    bool degenerate;
};

inline ClosedForm closed_form(const ModelParams& p) {
    const double xi = p.squeeze_rate, g = p.decay_rate, G = p.dephasing_rate;
    const double xi2 = 16.0 * xi * xi;
    const double root = std::sqrt(G * G + xi2);
    const double root_minus_G = root + G > 0.0 ? xi2 / (root + G) : 0.0;
    const double growth = root_minus_G - g;
    const double scale = std::max(root, G + g);
    const bool degenerate = root == 0.0 || std::abs(growth) < kDegeneracyGap * scale;
    return {root, growth, root + G + g, degenerate};
}

}  // namespace detail

// Closed-form <n>(t) for s(0) = 0 and <n>(0) = n0:
//
//   n(t) = (R+Gamma)/(4R) (2 n0 + (R-Gamma)/(R-Gamma-gamma)) e^{(R-Gamma-gamma) t}
//        + (R-Gamma)/(4R) (2 n0 + (R+Gamma)/(R+Gamma+gamma)) e^{-(R+Gamma+gamma) t}
//        - (1/2) 16 xi^2 / (R^2 - (Gamma+gamma)^2),     R = sqrt(Gamma^2 + 16 xi^2).
//
// At R = Gamma + gamma (the growth threshold) the first and last terms are
// individually singular; within kDegeneracyGap of it the value comes from
// integrate_moments instead.
inline double analytic_n(double t, const ModelParams& p) {
    if (t == 0.0) return p.initial_photons;
    const auto cf = detail::closed_form(p);
    if (cf.degenerate) return integrate_moments_at(t, {p.initial_photons, 0.0}, p).n;

    const double xi = p.squeeze_rate, G = p.dephasing_rate;
    const double R = cf.root, n0 = p.initial_photons;
    const double r_minus_G = 16.0 * xi * xi / (R + G);
    const double grow = (R + G) / (4.0 * R) * (2.0 * n0 + r_minus_G / cf.growth) * std::exp(cf.growth * t);
    const double fade = r_minus_G / (4.0 * R) * (2.0 * n0 + (R + G) / cf.decay) * std::exp(-cf.decay * t);
    const double offset = -0.5 * 16.0 * xi * xi / (cf.growth * cf.decay);
    return grow + fade + offset;
}

// Companion closed form for s(t), from the eigenvectors of the same 2x2 system:
//   s = 8 xi/(R+Gamma) * grow - (2 xi/R)(2 n0 + (R+Gamma)/(R+Gamma+gamma)) e^{-(R+Gamma+gamma)t}
//       - 4 xi gamma / (R^2 - (Gamma+gamma)^2)
inline double analytic_s(double t, const ModelParams& p) {
    if (t == 0.0) return 0.0;
    const auto cf = detail::closed_form(p);
    if (cf.degenerate) return integrate_moments_at(t, {p.initial_photons, 0.0}, p).s;

    const double xi = p.squeeze_rate, g = p.decay_rate, G = p.dephasing_rate;
    const double R = cf.root, n0 = p.initial_photons;
    const double r_minus_G = 16.0 * xi * xi / (R + G);
    const double grow = (R + G) / (4.0 * R) * (2.0 * n0 + r_minus_G / cf.growth) * std::exp(cf.growth * t);
    const double fade = (2.0 * xi / R) * (2.0 * n0 + (R + G) / cf.decay) * std::exp(-cf.decay * t);
    return 8.0 * xi / (R + G) * grow - fade - 4.0 * xi * g / (cf.growth * cf.decay);
}

// Growth rate of the dominant mode, sqrt(Gamma^2 + 16 xi^2) - Gamma - gamma.
inline double characteristic_exponent(const ModelParams& p) { return detail::closed_form(p).growth; }

// Strict growth condition 16 xi^2 > gamma^2 + 2 gamma Gamma.
inline bool above_threshold(const ModelParams& p) {
    const double g = p.decay_rate;
    return 16.0 * p.squeeze_rate * p.squeeze_rate > g * g + 2.0 * g * p.dephasing_rate;
}

// Long-time limit below threshold, 8 xi^2 / (2 Gamma gamma + gamma^2 - 16 xi^2).
inline std::optional<double> steady_state_n(const ModelParams& p) {
    const double xi = p.squeeze_rate, g = p.decay_rate, G = p.dephasing_rate;
    const double denom = 2.0 * G * g + g * g - 16.0 * xi * xi;
    if (!(denom > 0.0)) return std::nullopt;
    return 8.0 * xi * xi / denom;
}

// Leading behaviour for Gamma >> xi, gamma = 0: (n0 + 1/2) e^{8 xi^2 t / Gamma} - 1/2.
// Evaluated for any parameters; only the Gamma > 0 requirement is enforced.
inline double fast_decoherence_n(double t, const ModelParams& p) {
    if (!(p.dephasing_rate > 0.0)) throw InvalidRegime("fast-dephasing limit needs a positive dephasing rate");
    const double xi = p.squeeze_rate;
    return (p.initial_photons + 0.5) * std::exp(8.0 * xi * xi * t / p.dephasing_rate) - 0.5;
}

// Undamped squeezed vacuum: sinh^2(2 xi t).
inline double ideal_n(double t, double xi) {
    const double s = std::sinh(2.0 * xi * t);
    return s * s;
}

// Its quadrature moment, sinh(4 xi t).
inline double ideal_s(double t, double xi) { return std::sinh(4.0 * xi * t); }

}  // namespace dce
