#pragma once

// Three-level electron model for a laser-controlled permittivity.
//
// Level a is the compact ground state, b is reached from a by the laser
// (Rabi frequency Omega_R(t)), and c lies Delta_omega above b and mixes with
// b through the dipole coupling kappa to a slow test field E(t). The
// Lagrangian
//
//   L = i a* a' + i b* b' + i c* c' - Delta_omega c* c
//       + (kappa E b* c + Omega_R a* b + h.c.)
//
// varied with respect to a*, b*, c* (kappa and E real) gives
//
//   i a' = -Omega_R b
//   i b' = -conj(Omega_R) a - kappa E c
//   i c' =  Delta_omega c - kappa E b
//
// i.e. i psi' = H psi with the Hermitian H below, so the norm is conserved.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "dce/ode.hpp"
#include "dce/types.hpp"

namespace dce {

class DegenerateLevels : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct ThreeLevelParams {
    double level_gap = 1.0;  // Delta_omega between b and c, > 0
    double dipole = 0.0;     // kappa; kappa * E is a frequency
    std::function<Complex(double)> rabi = [](double) { return Complex(0.0); };
    std::function<double(double)> field = [](double) { return 0.0; };

    void validate() const {
        if (!(level_gap > 0.0)) throw InvalidArgument("ThreeLevelParams.level_gap must be > 0");
        if (!rabi || !field) throw InvalidArgument("ThreeLevelParams drive functions must be set");
    }
};

struct ThreeLevelState {
    Complex ground;   // psi_a
    Complex excited;  // psi_b
    Complex upper;    // psi_c

    double norm_sq() const { return std::norm(ground) + std::norm(excited) + std::norm(upper); }

    Eigen::Vector3cd to_vector() const { return {ground, excited, upper}; }
    static ThreeLevelState from_vector(const Eigen::Vector3cd& v) { return {v(0), v(1), v(2)}; }
};

inline Eigen::Matrix3cd three_level_hamiltonian(double t, const ThreeLevelParams& p) {
    const Complex rabi = p.rabi(t);
    const double mix = p.dipole * p.field(t);
    Eigen::Matrix3cd h;
    h << 0.0, -rabi, 0.0,
         -std::conj(rabi), 0.0, -mix,
         0.0, -mix, p.level_gap;
    return h;
}

inline ThreeLevelState three_level_rhs(const ThreeLevelState& state, double t, const ThreeLevelParams& p) {
    const Eigen::Vector3cd d = -kI * (three_level_hamiltonian(t, p) * state.to_vector());
    return ThreeLevelState::from_vector(d);
}

struct ThreeLevelRun {
    std::vector<double> times;
    std::vector<ThreeLevelState> states;
    double max_norm_drift = 0.0;         // max | |psi|^2 - |psi(0)|^2 |
    double max_upper_ratio = 0.0;        // max |psi_c| / |psi_b| over samples with psi_b != 0
    bool linear_response_warning = false;  // |psi_c| > 0.1 |psi_b| somewhere
    ode::Stats stats;
};

inline ThreeLevelRun integrate_three_level(const ThreeLevelState& psi0, const ThreeLevelParams& p,
                                           const std::vector<double>& times, const ode::Options& opt = {}) {
    p.validate();
    ThreeLevelRun run;
    run.times.reserve(times.size());
    run.states.reserve(times.size());
    const double norm0 = psi0.norm_sq();

    auto rhs = [&p](double t, const Eigen::Vector3cd& y, Eigen::Vector3cd& dy) {
        dy.noalias() = -kI * (three_level_hamiltonian(t, p) * y);
    };
    auto observe = [&](std::size_t, double t, const Eigen::Vector3cd& y) {
        const ThreeLevelState s = ThreeLevelState::from_vector(y);
        run.times.push_back(t);
        run.states.push_back(s);
        run.max_norm_drift = std::max(run.max_norm_drift, std::abs(s.norm_sq() - norm0));
        if (std::abs(s.excited) > 0.0) {
            const double ratio = std::abs(s.upper) / std::abs(s.excited);
            run.max_upper_ratio = std::max(run.max_upper_ratio, ratio);
            if (ratio > 0.1) run.linear_response_warning = true;
        }
    };
    run.stats = ode::integrate_dense(rhs, psi0.to_vector(), std::span<const double>(times), opt, observe);
    return run;
}

// Slowly varying field: kappa E psi_b = Delta_omega psi_c - i psi_c' ~ Delta_omega psi_c.
inline Complex adiabatic_psi_c(Complex psi_b, double field, const ThreeLevelParams& p) {
    if (!(p.level_gap > 0.0)) throw InvalidArgument("level gap must be > 0");
    return p.dipole * field * psi_b / p.level_gap;
}

// Eliminating psi_c leaves L_eff = |psi_b|^2 (kappa^2 / Delta_omega) E^2 = ((eps - 1)/2) E^2.
inline double effective_permittivity(Complex psi_b, const ThreeLevelParams& p) {
    if (!(p.level_gap > 0.0)) throw InvalidArgument("level gap must be > 0");
    return 1.0 + 2.0 * std::norm(psi_b) * p.dipole * p.dipole / p.level_gap;
}

// b-amplitude of a resonantly driven a <-> b transition started in b.
inline double rabi_amplitude(double t, double rabi_freq) { return std::cos(rabi_freq * t); }

// Second-order shift of level b relative to its unperturbed energy,
// |<b|E|c>|^2 / (E_b - E_c); the first-order term vanishes in the dipole
// approximation. gap = E_b - E_c, i.e. -Delta_omega for this model.
inline double stark_shift(double field, double dipole_bc, double gap) {
    if (gap == 0.0) throw DegenerateLevels("second-order shift undefined for degenerate levels");
    const double m = dipole_bc * field;
    return m * m / gap;
}

// xi = (1/2) (k_par^2 / omega) (a / L) chi for a thin slab of thickness a at
// one wall of a cavity of length L, with chi the modulation amplitude of the
// inverse permittivity.
inline double xi_from_geometry(double k_par, double omega, double slab, double cavity_len, double chi) {
    if (!(omega > 0.0)) throw InvalidArgument("drive frequency must be > 0");
    if (!(cavity_len > 0.0)) throw InvalidArgument("cavity length must be > 0");
    return 0.5 * (k_par * k_par / omega) * (slab / cavity_len) * chi;
}

// O(.) estimates, implemented with prefactor exactly 1.
struct Estimate {
    double value;
    std::string_view source = "order-of-magnitude";
};

// Energy noise per cycle from spontaneous decays, O(N xi).
inline Estimate noise_energy_estimate(std::int64_t photons, double xi) {
    if (photons < 0) throw InvalidArgument("photon number must be >= 0");
    return {static_cast<double>(photons) * xi};
}

// Photon number above which decay-induced dephasing matters, O(sqrt(M) Omega / xi).
inline Estimate decoherence_photon_threshold(std::int64_t laser_photons, double mode_freq, double xi) {
    if (laser_photons < 0) throw InvalidArgument("laser photon number must be >= 0");
    if (!(xi > 0.0)) throw InvalidArgument("squeeze rate must be > 0");
    return {std::sqrt(static_cast<double>(laser_photons)) * mode_freq / xi};
}

// Energy gained from squeezing per cycle of duration 1/Omega: N photons of
// energy Omega growing at growth_rate give N * growth_rate.
inline Estimate dce_energy_gain_per_cycle(std::int64_t photons, double growth_rate) {
    if (photons < 0) throw InvalidArgument("photon number must be >= 0");
    return {static_cast<double>(photons) * growth_rate};
}

}  // namespace dce
