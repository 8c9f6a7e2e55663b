#include <cmath>

#include <gtest/gtest.h>

#include "mixts/optimize.hpp"

using namespace mixts;

TEST(Optimize, Rosenbrock) {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(2);
        g(0) = -400 * x(0) * (x(1) - x(0) * x(0)) - 2 * (1 - x(0));
        g(1) = 200 * (x(1) - x(0) * x(0));
        return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2);
    };
    const MinimizeResult r =
        minimize_box(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-5, -5), Eigen::Vector2d(5, 5));
    EXPECT_TRUE(r.converged) << r.message;
    EXPECT_NEAR(r.x(0), 1.0, 1e-4);
    EXPECT_NEAR(r.x(1), 1.0, 1e-4);
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
}

TEST(Optimize, ActiveBounds) {
    // Unconstrained minimum at (-1, 2, 0.5); the box cuts off the first two.
    const Eigen::Vector3d c(-1, 2, 0.5);
    auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = 2 * (x - c);
        return (x - c).squaredNorm();
    };
    const MinimizeResult r =
        minimize_box(f, Eigen::Vector3d(0.5, 0.5, 0.9), Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x(0), 0.0, 1e-12);
    EXPECT_NEAR(r.x(1), 1.0, 1e-12);
    EXPECT_NEAR(r.x(2), 0.5, 1e-6);
}

TEST(Optimize, InfeasibleRegionBacktracks) {
    // log barrier: infinite for x <= 0.
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) -> double {
        g.resize(1);
        if (x(0) <= 0.0) return INFINITY;
        g(0) = 1.0 - 1.0 / x(0);
        return x(0) - std::log(x(0));
    };
    Eigen::VectorXd lo(1), hi(1), x0(1);
    lo << -10;
    hi << 10;
    x0 << 8;
    const MinimizeResult r = minimize_box(f, x0, lo, hi);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x(0), 1.0, 1e-5);
}

TEST(Optimize, StartIsProjected) {
    auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = 2 * x;
        return x.squaredNorm();
    };
    Eigen::VectorXd lo(2), hi(2);
    lo << 1, -1;
    hi << 2, 1;
    const MinimizeResult r = minimize_box(f, Eigen::Vector2d(5, 5), lo, hi);
    EXPECT_NEAR(r.x(0), 1.0, 1e-12);
    EXPECT_NEAR(r.x(1), 0.0, 1e-6);
}
