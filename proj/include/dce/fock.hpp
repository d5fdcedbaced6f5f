#pragma once

// Operators and states on the lowest D Fock states of a single bosonic mode.
//
// The truncation keeps |0>..|D-1>; the top level has no outgoing creation
// amplitude, so [a, a^dagger] = 1 holds everywhere except the (D-1, D-1)
// entry. Leakage into the top levels is measured by callers, not prevented.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>

#include "dce/types.hpp"

namespace dce {

namespace detail {

inline void require_dim(int dim) {
    if (dim < 2) {
        throw InvalidDimension("Fock truncation dimension must be >= 2, got " + std::to_string(dim));
    }
}

}  // namespace detail

inline Operator annihilation(int dim) {
    detail::require_dim(dim);
    Operator a = Operator::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

inline Operator creation(int dim) { return annihilation(dim).adjoint(); }

inline Operator number_operator(int dim) {
    detail::require_dim(dim);
    Operator n = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

// H = i xi ((a^dagger)^2 - a^2). Built entry by entry so that H == H^dagger
// holds bitwise: H(m+2, m) = i xi sqrt((m+1)(m+2)) and H(m, m+2) is its conjugate.
inline Operator squeeze_hamiltonian(double xi, int dim) {
    detail::require_dim(dim);
    if (!std::isfinite(xi)) throw InvalidArgument("squeeze rate must be finite");
    Operator h = Operator::Zero(dim, dim);
    for (int m = 0; m + 2 < dim; ++m) {
        const double amp = xi * std::sqrt(static_cast<double>(m + 1) * static_cast<double>(m + 2));
        h(m + 2, m) = Complex(0.0, amp);
        h(m, m + 2) = Complex(0.0, -amp);
    }
    return h;
}

struct StateCheck {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
};

inline double hermiticity_error(const Operator& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Operator& m) {
    const Operator herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

inline StateCheck check_state(const Operator& m) {
    return {std::abs(m.trace() - Complex(1.0)), hermiticity_error(m), min_eigenvalue(m)};
}

// Hermitian, unit-trace, positive semidefinite matrix on the truncated space.
class DensityMatrix {
public:
    // Validates against the tolerances; throws InvalidState on violation.
    static DensityMatrix checked(Operator m, const Tolerances& tol = {}) {
        if (m.rows() != m.cols()) throw InvalidState("density matrix must be square");
        detail::require_dim(static_cast<int>(m.rows()));
        const StateCheck c = check_state(m);
        if (c.hermiticity_error > tol.hermiticity) {
            throw InvalidState("density matrix is not Hermitian (max |rho - rho^dagger| = " +
                               std::to_string(c.hermiticity_error) + ")");
        }
        if (c.trace_error > tol.trace) {
            throw InvalidState("density matrix trace differs from 1 by " + std::to_string(c.trace_error));
        }
        if (c.min_eigenvalue < -tol.positivity) {
            throw InvalidState("density matrix has negative eigenvalue " + std::to_string(c.min_eigenvalue));
        }
        return DensityMatrix(std::move(m));
    }

    // For integrator output, where the diagnostics are reported rather than enforced.
    static DensityMatrix unchecked(Operator m) { return DensityMatrix(std::move(m)); }

    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    const Operator& matrix() const noexcept { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }

private:
    explicit DensityMatrix(Operator m) : m_(std::move(m)) {}

    Operator m_;
};

inline DensityMatrix number_diagonal_density(std::span<const double> probs, const Tolerances& tol = {}) {
    const int dim = static_cast<int>(probs.size());
    detail::require_dim(dim);
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw InvalidState("occupation probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol.trace) {
        throw InvalidState("occupation probabilities sum to " + std::to_string(sum) + ", not 1");
    }
    Operator m = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) m(k, k) = probs[k];
    return DensityMatrix::unchecked(std::move(m));
}

inline DensityMatrix fock_state(int k, int dim) {
    detail::require_dim(dim);
    if (k < 0 || k >= dim) throw InvalidState("Fock level outside the truncated space");
    Operator m = Operator::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityMatrix::unchecked(std::move(m));
}

inline DensityMatrix vacuum(int dim) { return fock_state(0, dim); }

// Geometric occupation p_k ~ (nbar / (1 + nbar))^k, renormalised on the
// truncated space. Reduces to the vacuum for nbar = 0.
inline DensityMatrix thermal_state(double mean_n, int dim) {
    detail::require_dim(dim);
    if (!(mean_n >= 0.0)) throw InvalidState("thermal mean photon number must be >= 0");
    if (mean_n == 0.0) return vacuum(dim);
    const double q = mean_n / (1.0 + mean_n);
    Eigen::VectorXd p(dim);
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
        p(k) = w;
        w *= q;
    }
    p /= p.sum();
    return number_diagonal_density(std::span<const double>(p.data(), static_cast<std::size_t>(dim)));
}

// exp(-i H t)|0> for H = squeeze_hamiltonian(xi), with r = 2 xi t.
// Amplitudes c_{2m} = tanh(r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r)), renormalised
// after truncation.
inline DensityMatrix squeezed_vacuum(double r, int dim) {
    detail::require_dim(dim);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    const double th = std::tanh(r);
    double c = 1.0 / std::sqrt(std::cosh(r));
    for (int m = 0; 2 * m < dim; ++m) {
        psi(2 * m) = c;
        c *= th * std::sqrt((2.0 * m + 1.0) / (2.0 * m + 2.0));
    }
    psi.normalize();
    return DensityMatrix::unchecked(psi * psi.adjoint());
}

// Ginibre-ensemble state G G^dagger / Tr, reproducible from the seed.
inline DensityMatrix random_density(int dim, std::uint64_t seed) {
    detail::require_dim(dim);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Operator g(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = Complex(normal(rng), normal(rng));
    Operator rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix::unchecked(std::move(rho));
}

inline Complex expectation(const DensityMatrix& rho, const Operator& op) {
    if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
        throw DimensionMismatch("operator and density matrix dimensions differ");
    }
    // Tr(rho op) without forming the product.
    return (rho.matrix().transpose().array() * op.array()).sum();
}

inline double mean_photon_number(const Operator& rho) {
    double n = 0.0;
    for (int k = 1; k < rho.rows(); ++k) n += k * rho(k, k).real();
    return n;
}

inline double mean_photon_number(const DensityMatrix& rho) { return mean_photon_number(rho.matrix()); }

// <(a^dagger)^2 + a^2> = 2 Re sum_m sqrt((m+1)(m+2)) rho(m+2, m).
inline double quadrature_moment(const Operator& rho) {
    Complex acc = 0.0;
    for (int m = 0; m + 2 < rho.rows(); ++m) {
        acc += std::sqrt(static_cast<double>(m + 1) * static_cast<double>(m + 2)) * rho(m + 2, m);
    }
    return 2.0 * acc.real();
}

inline double quadrature_moment(const DensityMatrix& rho) { return quadrature_moment(rho.matrix()); }

// Number of top Fock levels whose population counts as truncation leakage.
inline int leakage_levels(int dim) { return std::max(2, dim / 16); }

inline double top_population(const Operator& rho) {
    const int dim = static_cast<int>(rho.rows());
    double p = 0.0;
    for (int k = dim - leakage_levels(dim); k < dim; ++k) p += rho(k, k).real();
    return p;
}

}  // namespace dce
