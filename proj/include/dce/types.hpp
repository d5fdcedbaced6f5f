#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dce {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

// Numerical tolerances shared by the state checks and the integrator
// diagnostics. Defaults sit just above the double-precision roundoff floor.
struct Tolerances {
    double hermiticity = 1e-10;
    double trace = 1e-10;
    double positivity = 1e-8;
    double leakage = 1e-6;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double last_good_time)
        : Error(what + " (last good time " + std::to_string(last_good_time) + ")"),
          last_good_time_(last_good_time) {}

    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

}  // namespace dce
