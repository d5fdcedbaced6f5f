#pragma once

// Master equation for the squeezed cavity mode with amplitude and phase damping:
//
//   d rho/dt = xi [(a^dagger)^2 - a^2, rho]
//            + (Gamma/2) (2 n rho n - {n^2, rho})
//            + (gamma/2) (2 a rho a^dagger - {n, rho})
//
// in the interaction picture (the free term Omega a^dagger a is absent).
// The decay channel is zero-temperature: there is no sqrt(gamma) a^dagger operator.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dce/fock.hpp"
#include "dce/model.hpp"
#include "dce/ode.hpp"
#include "dce/types.hpp"

namespace dce {

// Applies the generator in O(D^2): every operator involved is banded, so
// each element of d rho/dt needs at most six neighbours of rho.
class LindbladGenerator {
public:
    LindbladGenerator(const ModelParams& p, int dim)
        : xi_(p.squeeze_rate), gamma_(p.decay_rate), dephasing_(p.dephasing_rate), dim_(dim),
          pair_(static_cast<std::size_t>(dim)), hop_(static_cast<std::size_t>(dim)) {
        detail::require_dim(dim);
        for (int m = 0; m < dim; ++m) {
            pair_[m] = std::sqrt(static_cast<double>(m + 1) * static_cast<double>(m + 2));
            hop_[m] = std::sqrt(static_cast<double>(m + 1));
        }
    }

    int dim() const noexcept { return dim_; }

    void apply(const Operator& rho, Operator& out) const {
        if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionMismatch("rho does not match generator dimension");
        out.resize(dim_, dim_);
        const int d = dim_;
        for (int n = 0; n < d; ++n) {
            for (int m = 0; m < d; ++m) {
                const Complex r = rho(m, n);
                // A = (a^dagger)^2 - a^2:
                //   (A rho)(m,n) = q(m-2) rho(m-2,n) - q(m) rho(m+2,n)
                //   (rho A)(m,n) = q(n) rho(m,n+2) - q(n-2) rho(m,n-2)
                Complex comm = 0.0;
                if (m >= 2) comm += pair_[m - 2] * rho(m - 2, n);
                if (m + 2 < d) comm -= pair_[m] * rho(m + 2, n);
                if (n + 2 < d) comm -= pair_[n] * rho(m, n + 2);
                if (n >= 2) comm += pair_[n - 2] * rho(m, n - 2);

                const double diff = static_cast<double>(m - n);
                Complex v = xi_ * comm;
                v -= (0.5 * dephasing_ * diff * diff + 0.5 * gamma_ * static_cast<double>(m + n)) * r;
                if (m + 1 < d && n + 1 < d) v += gamma_ * hop_[m] * hop_[n] * rho(m + 1, n + 1);
                out(m, n) = v;
            }
        }
    }

private:
    double xi_, gamma_, dephasing_;
    int dim_;
    std::vector<double> pair_;  // sqrt((m+1)(m+2))
    std::vector<double> hop_;   // sqrt(m+1)
};

inline Operator lindblad_rhs(const DensityMatrix& rho, const ModelParams& p) {
    Operator out;
    LindbladGenerator(p, rho.dim()).apply(rho.matrix(), out);
    return out;
}

struct EvolveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    Tolerances tol;               // tol.leakage is the truncation-warning threshold
    int positivity_every = 0;     // spot-check min eigenvalue every k-th output; 0 = never
    bool keep_states = false;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> mean_n;
    std::vector<double> s_moment;   // <(a^dagger)^2 + a^2>
    std::vector<double> trace_err;  // |Tr rho - 1|
    std::vector<double> herm_err;   // max of |rho - rho^dagger| and the anti-Hermitian part discarded since the last sample
    std::vector<double> leakage;    // population of the top leakage_levels(D) Fock states
    std::vector<double> min_eigenvalue;  // NaN where not spot-checked
    std::vector<Operator> states;   // filled only with keep_states
    bool truncation_warning = false;
    ode::Stats stats;

    std::size_t size() const { return times.size(); }
    double max_trace_err() const { return max_of(trace_err); }
    double max_herm_err() const { return max_of(herm_err); }
    double max_leakage() const { return max_of(leakage); }

private:
    static double max_of(const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    }
};

// Carries the samples recorded before the integrator gave up.
class EvolveFailure : public IntegrationFailure {
public:
    EvolveFailure(const IntegrationFailure& cause, Trajectory partial)
        : IntegrationFailure(cause), partial_(std::move(partial)) {}

    const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

// Thermal state with mean n0 (vacuum for n0 = 0): the default diagonal start.
inline DensityMatrix default_initial_state(const ModelParams& p) { return thermal_state(p.initial_photons, p.dim); }

// Integrates the master equation and samples it exactly at p.times. The trace
// is never renormalised; its drift is reported. The Hermitian part is
// enforced after every accepted step.
inline Trajectory evolve(const DensityMatrix& rho0, const ModelParams& p, const EvolveOptions& opt = {}) {
    p.validate();
    if (rho0.dim() != p.dim) throw DimensionMismatch("initial state dimension differs from ModelParams.dim");
    if (!(opt.rel_tol > 0.0 && opt.rel_tol < 1.0) || !(opt.abs_tol > 0.0 && opt.abs_tol < 1.0)) {
        throw InvalidArgument("integrator tolerances must lie in (0, 1)");
    }

    const LindbladGenerator gen(p, p.dim);
    const std::size_t n_out = p.times.size();
    Trajectory traj;
    traj.times.reserve(n_out);

    double discarded = 0.0;
    auto observe = [&](std::size_t idx, double t, const Operator& rho) {
        const double herm = hermiticity_error(rho);
        traj.times.push_back(t);
        traj.mean_n.push_back(mean_photon_number(rho));
        traj.s_moment.push_back(quadrature_moment(rho));
        traj.trace_err.push_back(std::abs(rho.trace() - Complex(1.0)));
        traj.herm_err.push_back(std::max(herm, discarded));
        const double leak = top_population(rho);
        traj.leakage.push_back(leak);
        if (leak > opt.tol.leakage) traj.truncation_warning = true;
        const bool spot = opt.positivity_every > 0 && idx % static_cast<std::size_t>(opt.positivity_every) == 0;
        traj.min_eigenvalue.push_back(spot ? min_eigenvalue(rho) : std::numeric_limits<double>::quiet_NaN());
        if (opt.keep_states) traj.states.push_back(rho);
        discarded = 0.0;
    };
    auto hermitise = [&](Operator& rho) {
        const Operator anti = 0.5 * (rho - rho.adjoint());
        discarded = std::max(discarded, anti.cwiseAbs().maxCoeff());
        rho -= anti;
    };
    auto rhs = [&gen](double, const Operator& rho, Operator& out) { gen.apply(rho, out); };

    ode::Options ode_opt;
    ode_opt.rel_tol = opt.rel_tol;
    ode_opt.abs_tol = opt.abs_tol;
    ode_opt.max_step = opt.max_step;
    ode_opt.max_steps = opt.max_steps;
    try {
        traj.stats = ode::integrate_dense(rhs, Operator(rho0.matrix()), std::span<const double>(p.times), ode_opt,
                                          observe, hermitise);
    } catch (const IntegrationFailure& e) {
        throw EvolveFailure(e, std::move(traj));
    }
    return traj;
}

inline Trajectory evolve(const ModelParams& p, const EvolveOptions& opt = {}) {
    return evolve(default_initial_state(p), p, opt);
}

}  // namespace dce
