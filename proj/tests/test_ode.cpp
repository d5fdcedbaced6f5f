#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "dce/ode.hpp"

using namespace dce;

namespace {

using Vec = Eigen::VectorXd;

std::vector<double> grid(double t_max, int n) {
    std::vector<double> t(n + 1);
    for (int i = 0; i <= n; ++i) t[i] = t_max * i / n;
    return t;
}

}  // namespace

TEST(Ode, HarmonicOscillatorAtEveryOutput) {
    auto rhs = [](double, const Vec& y, Vec& dy) {
        dy.resize(2);
        dy << y(1), -y(0);
    };
    const auto times = grid(20.0, 137);
    double worst = 0.0;
    std::size_t seen = 0;
    ode::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    ode::integrate_dense(rhs, Vec(Vec::Unit(2, 0)), std::span<const double>(times), opt,
                         [&](std::size_t i, double t, const Vec& y) {
                             EXPECT_EQ(i, seen++);
                             EXPECT_EQ(t, times[i]);
                             worst = std::max({worst, std::abs(y(0) - std::cos(t)), std::abs(y(1) + std::sin(t))});
                         });
    EXPECT_EQ(seen, times.size());
    EXPECT_LT(worst, 1e-8);
}

// The dense output interpolates inside long steps; a linear problem lets the
// integrator take few steps so most outputs come from the interpolant.
TEST(Ode, DenseOutputAccuracyInsideSteps) {
    auto rhs = [](double, const Vec& y, Vec& dy) { dy = -0.3 * y; };
    const auto times = grid(10.0, 1000);
    double worst = 0.0;
    ode::Options opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-12;
    const ode::Stats st = ode::integrate_dense(rhs, Vec(Vec::Ones(1)), std::span<const double>(times), opt,
                                               [&](std::size_t, double t, const Vec& y) {
                                                   worst = std::max(worst, std::abs(y(0) - std::exp(-0.3 * t)));
                                               });
    EXPECT_LT(st.accepted, 200u);
    EXPECT_LT(worst, 1e-8);
}

TEST(Ode, PostStepIsApplied) {
    auto rhs = [](double, const Vec& y, Vec& dy) { dy = y; };
    int calls = 0;
    const std::vector<double> times{0.0, 1.0};
    ode::integrate_dense(rhs, Vec(Vec::Ones(1)), std::span<const double>(times), {},
                         [](std::size_t, double, const Vec&) {}, [&](Vec&) { ++calls; });
    EXPECT_GT(calls, 0);
}

TEST(Ode, BlowUpReportsLastGoodTime) {
    auto rhs = [](double, const Vec& y, Vec& dy) { dy = y.cwiseProduct(y); };
    const std::vector<double> times{0.0, 0.5, 2.0};
    try {
        ode::integrate_dense(rhs, Vec(Vec::Ones(1)), std::span<const double>(times), {},
                             [](std::size_t, double, const Vec&) {});
        FAIL() << "expected IntegrationFailure";
    } catch (const IntegrationFailure& e) {
        EXPECT_GT(e.last_good_time(), 0.5);
        EXPECT_LT(e.last_good_time(), 1.01);
    }
}

TEST(Ode, StepBudgetExhaustion) {
    auto rhs = [](double, const Vec& y, Vec& dy) { dy = -y; };
    ode::Options opt;
    opt.max_steps = 3;
    opt.max_step = 1e-3;
    const std::vector<double> times{0.0, 1.0};
    EXPECT_THROW(ode::integrate_dense(rhs, Vec(Vec::Ones(1)), std::span<const double>(times), opt,
                                      [](std::size_t, double, const Vec&) {}),
                 IntegrationFailure);
}

TEST(Ode, RejectsNonIncreasingTimes) {
    auto rhs = [](double, const Vec& y, Vec& dy) { dy = y; };
    const std::vector<double> times{0.0, 1.0, 1.0};
    EXPECT_THROW(ode::integrate_dense(rhs, Vec(Vec::Ones(1)), std::span<const double>(times), {},
                                      [](std::size_t, double, const Vec&) {}),
                 InvalidArgument);
}
