#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dce/analysis.hpp"
#include "dce/model.hpp"
#include "dce/moments.hpp"

using namespace dce;

TEST(Analysis, ExactExponential) {
    const auto t = uniform_times(10.0, 100);
    std::vector<double> n;
    for (double x : t) n.push_back(0.5 * std::exp(0.37 * x) - 0.5);
    const ExponentFit fit = fit_exponent(t, n);
    EXPECT_NEAR(fit.rate, 0.37, 1e-10);
    EXPECT_TRUE(fit.growing);
    EXPECT_EQ(fit.points, 31u);
}

TEST(Analysis, ClosedFormAboveThreshold) {
    ModelParams p;
    p.squeeze_rate = 0.5;
    p.decay_rate = 0.3;
    p.dephasing_rate = 2.0;
    const double lambda = characteristic_exponent(p);
    ASSERT_GT(lambda, 0.0);
    const auto t = uniform_times(8.0 / lambda, 400);
    std::vector<double> n;
    for (double x : t) n.push_back(analytic_n(x, p));
    EXPECT_LT(std::abs(fit_exponent(t, n, 0.3).rate / lambda - 1.0), 0.01);
}

TEST(Analysis, BelowThresholdIsFlagged) {
    ModelParams p;
    p.squeeze_rate = 0.1;
    p.decay_rate = 1.0;
    p.initial_photons = 1.0;
    const auto t = uniform_times(30.0, 100);
    std::vector<double> n;
    for (double x : t) n.push_back(analytic_n(x, p));
    const ExponentFit fit = fit_exponent(t, n);
    EXPECT_FALSE(fit.growing);
    EXPECT_LE(fit.rate, 0.0);
}

TEST(Analysis, RejectsBadInput) {
    const std::vector<double> t{0.0, 1.0, 2.0}, n{0.0, 1.0, 2.0};
    EXPECT_THROW(fit_exponent(t, std::vector<double>{0.0, 1.0}), InvalidArgument);
    EXPECT_THROW(fit_exponent(std::vector<double>{0.0, 2.0, 1.0}, n), InvalidArgument);
    EXPECT_THROW(fit_exponent(t, std::vector<double>{0.0, -1.0, -2.0}, 1.0), InvalidArgument);
    EXPECT_THROW(fit_exponent(t, n, 0.0), InvalidArgument);
    EXPECT_THROW(fit_exponent(std::vector<double>{0.0}, std::vector<double>{1.0}), InvalidArgument);
}
