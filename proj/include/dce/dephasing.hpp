#pragma once

// Pure phase damping and the repeated-measurement picture of it.
//
// Without squeezing, phase damping multiplies each coherence rho(m, n) by
// exp(-(Gamma/2)(m-n)^2 t). A decisive number measurement removes the
// coherences entirely. Alternating unitary squeezing over dt with such a
// measurement gives the scalar recurrence
//
//   n -> n + |beta(dt)|^2 (1 + 2 n),    |beta(dt)|^2 = sinh^2(2 xi dt),
//
// i.e. (n + 1/2) grows by cosh(4 xi dt) per step.

#include <cmath>
#include <vector>

#include "dce/fock.hpp"
#include "dce/lindblad.hpp"
#include "dce/types.hpp"

namespace dce {

inline DensityMatrix dephase_map(const DensityMatrix& rho0, double dephasing_rate, double t) {
    if (!(dephasing_rate >= 0.0)) throw InvalidArgument("dephasing rate must be >= 0");
    if (!(t >= 0.0)) throw InvalidArgument("dephasing time must be >= 0");
    const int d = rho0.dim();
    Operator out = rho0.matrix();
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            if (m == n) continue;
            const double diff = static_cast<double>(m - n);
            out(m, n) *= std::exp(-0.5 * dephasing_rate * diff * diff * t);
        }
    }
    return DensityMatrix::unchecked(std::move(out));
}

inline DensityMatrix project_diagonal(const DensityMatrix& rho) {
    Operator out = Operator::Zero(rho.dim(), rho.dim());
    out.diagonal() = rho.matrix().diagonal();
    return DensityMatrix::unchecked(std::move(out));
}

// a(t + dt) = alpha a(t) + beta a^dagger(t).
struct BogoliubovCoeffs {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    double unitarity_defect() const { return std::norm(alpha) - std::norm(beta) - 1.0; }
};

// Real positive convention (cosh, sinh) for H = i xi ((a^dagger)^2 - a^2);
// only |beta|^2 is observable here.
inline BogoliubovCoeffs squeeze_bogoliubov(double xi, double dt) {
    if (!(dt >= 0.0)) throw InvalidArgument("Bogoliubov interval must be >= 0");
    const double x = 2.0 * xi * dt;
    return {Complex(std::cosh(x), 0.0), Complex(std::sinh(x), 0.0)};
}

inline double measured_step(double n, double xi, double dt) {
    if (!(n >= 0.0)) throw InvalidArgument("photon number must be >= 0");
    const double beta_sq = std::norm(squeeze_bogoliubov(xi, dt).beta);
    return n + beta_sq * (1.0 + 2.0 * n);
}

// n at steps 0..steps (steps + 1 values).
inline std::vector<double> gedanken_evolution(double n0, double xi, double dt, int steps) {
    if (steps < 1) throw InvalidArgument("gedanken evolution needs at least one step");
    if (!(dt > 0.0)) throw InvalidArgument("gedanken step must be positive");
    std::vector<double> n(static_cast<std::size_t>(steps) + 1);
    n[0] = n0;
    for (int k = 0; k < steps; ++k) n[k + 1] = measured_step(n[k], xi, dt);
    return n;
}

struct VacuumResonanceSplit {
    double vacuum;     // |beta|^2: pair creation from the vacuum
    double resonance;  // 2 |beta|^2 n: stimulated amplification of photons present
};

inline VacuumResonanceSplit vacuum_vs_resonance_split(double n, double beta_sq) {
    if (!(n >= 0.0) || !(beta_sq >= 0.0)) throw InvalidArgument("split needs n >= 0 and |beta|^2 >= 0");
    return {beta_sq, 2.0 * beta_sq * n};
}

// Exact growth rate of (n + 1/2) per unit time: ln(cosh(4 xi dt)) / dt.
// For xi dt << 1 this is 8 xi^2 dt; with dt = c / Gamma it becomes c * 8 xi^2 / Gamma.
inline double gedanken_exponent(double xi, double dt) { return std::log(std::cosh(4.0 * xi * dt)) / dt; }

// Measurement interval dt = c / Gamma. The O(1) constant c is left to the caller.
inline double measurement_interval(double dephasing_rate, double c = 1.0) {
    if (!(dephasing_rate > 0.0)) throw InvalidArgument("dephasing rate must be positive");
    return c / dephasing_rate;
}

// Density-matrix version of the same experiment: undamped master-equation
// evolution over dt followed by project_diagonal, repeated. Returns <n> at
// steps 0..steps together with the largest leakage seen.
struct DensityGedanken {
    std::vector<double> mean_n;
    double max_leakage = 0.0;
};

inline DensityGedanken gedanken_density_loop(const DensityMatrix& rho0, double xi, double dt, int steps,
                                             const EvolveOptions& opt = {}) {
    if (steps < 1) throw InvalidArgument("gedanken evolution needs at least one step");
    ModelParams p;
    p.squeeze_rate = xi;
    p.dim = rho0.dim();
    p.times = {0.0, dt};
    EvolveOptions o = opt;
    o.keep_states = true;

    DensityGedanken out;
    DensityMatrix rho = project_diagonal(rho0);
    out.mean_n.push_back(mean_photon_number(rho));
    for (int k = 0; k < steps; ++k) {
        const Trajectory tr = evolve(rho, p, o);
        out.max_leakage = std::max(out.max_leakage, tr.max_leakage());
        rho = project_diagonal(DensityMatrix::unchecked(tr.states.back()));
        out.mean_n.push_back(mean_photon_number(rho));
    }
    return out;
}

}  // namespace dce
