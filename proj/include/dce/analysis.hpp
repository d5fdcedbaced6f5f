#pragma once

#include <cmath>
#include <span>

#include "dce/types.hpp"

namespace dce {

struct ExponentFit {
    double rate = 0.0;     // slope of ln(n + 1/2)
    bool growing = false;  // rate > 0
    std::size_t points = 0;
};

// Least-squares slope of ln(n + 1/2) over the trailing `window` fraction of
// samples. The +1/2 offset makes the fast-dephasing law exactly log-linear.
inline ExponentFit fit_exponent(std::span<const double> t, std::span<const double> n, double window = 0.3) {
    if (t.size() != n.size()) throw InvalidArgument("fit_exponent: series lengths differ");
    if (!(window > 0.0 && window <= 1.0)) throw InvalidArgument("fit_exponent: window must be in (0, 1]");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw InvalidArgument("fit_exponent: times must be strictly increasing");
    }
    const std::size_t total = t.size();
    std::size_t count = static_cast<std::size_t>(std::ceil(window * static_cast<double>(total)));
    count = std::max<std::size_t>(count, 2);
    if (count > total) throw InvalidArgument("fit_exponent: need at least two samples");
    const std::size_t first = total - count;

    double st = 0.0, sy = 0.0;
    for (std::size_t i = first; i < total; ++i) {
        if (!(n[i] + 0.5 > 0.0)) throw InvalidArgument("fit_exponent: n + 1/2 must be positive in the window");
        st += t[i];
        sy += std::log(n[i] + 0.5);
    }
    const double tm = st / static_cast<double>(count), ym = sy / static_cast<double>(count);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = first; i < total; ++i) {
        const double dt = t[i] - tm;
        sxx += dt * dt;
        sxy += dt * (std::log(n[i] + 0.5) - ym);
    }
    ExponentFit fit;
    fit.rate = sxy / sxx;
    fit.growing = fit.rate > 0.0;
    fit.points = count;
    return fit;
}

}  // namespace dce
