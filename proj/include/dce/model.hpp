#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dce/types.hpp"

namespace dce {

// Parameters of the damped, squeezed cavity mode. Rates are angular
// frequencies (inverse time) with hbar = 1.
struct ModelParams {
    double squeeze_rate = 0.0;    // xi in H = i xi ((a^dagger)^2 - a^2)
    double decay_rate = 0.0;      // amplitude damping, Lindblad operator sqrt(gamma) a
    double dephasing_rate = 0.0;  // phase damping, Lindblad operator sqrt(Gamma) a^dagger a
    double initial_photons = 0.0; // <n> at t = 0; <a^dagger^2 + a^2> starts at 0
    int dim = 32;                 // Fock truncation
    std::vector<double> times{0.0};

    double t_max() const { return times.back(); }

    void validate() const {
        auto fail = [](const std::string& field, const std::string& why) {
            throw InvalidArgument("ModelParams." + field + ": " + why);
        };
        if (!std::isfinite(squeeze_rate)) fail("squeeze_rate", "must be finite");
        if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate)) fail("decay_rate", "must be >= 0");
        if (!(dephasing_rate >= 0.0) || !std::isfinite(dephasing_rate)) fail("dephasing_rate", "must be >= 0");
        if (!(initial_photons >= 0.0) || !std::isfinite(initial_photons)) fail("initial_photons", "must be >= 0");
        if (dim < 2) fail("dim", "must be >= 2");
        if (times.empty() || times.front() != 0.0) fail("times", "must start at 0");
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i] > times[i - 1])) fail("times", "must be strictly increasing");
        }
    }
};

// samples + 1 equally spaced points on [0, t_max].
inline std::vector<double> uniform_times(double t_max, int samples) {
    if (samples < 1 || !(t_max > 0.0)) throw InvalidArgument("uniform_times needs t_max > 0 and samples >= 1");
    std::vector<double> t(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i <= samples; ++i) t[static_cast<std::size_t>(i)] = t_max * i / samples;
    return t;
}

// max(32, ceil(16 (n0 + sinh^2(2 xi t_max)))), capped at 256. Squeezed-state
// photon-number tails decay geometrically, so a fixed multiple of the ideal
// photon number is a reasonable first guess; leakage remains the real check.
inline int default_dimension(double xi, double n0, double t_max) {
    const double s = std::sinh(2.0 * xi * t_max);
    const double guess = std::ceil(16.0 * (n0 + s * s));
    if (!std::isfinite(guess) || guess > 256.0) return 256;
    return std::max(32, static_cast<int>(guess));
}

}  // namespace dce
