#pragma once

#include <algorithm>
#include <cmath>
#include <vector>
#include <functional>

#include <Eigen/Dense>

#include "mixts/model.hpp"
#include "mixts/simulate.hpp"

namespace testing_util {

// GARCH + linear Poisson design used throughout the simulation studies.
inline mixts::ModelSpec gain_spec(double r = 0.0) {
    mixts::ModelSpec spec;
    spec.k = 2;
    spec.m = 0;
    spec.families = {mixts::Family::GaussianGarch, mixts::Family::PoissonLinear};
    spec.theta = mixts::ThetaLinear::zeros(2, 0);
    spec.theta.d << 0.03, 0.3;
    spec.theta.A << 0.05, 0.05, 0.3, 0.1;
    spec.theta.B.diagonal() << 0.7, 0.5;
    spec.R = Eigen::MatrixXd::Identity(2, 2);
    spec.set_r(r);
    return spec;
}

// Log-linear Poisson + logistic binary design with one covariate.
inline mixts::ModelSpec bip_spec(double r = 0.0) {
    mixts::ModelSpec spec;
    spec.k = 2;
    spec.m = 1;
    spec.families = {mixts::Family::PoissonLog, mixts::Family::BernoulliLogit};
    spec.theta = mixts::ThetaLinear::zeros(2, 1);
    spec.theta.d << 1.0, -1.0;
    spec.theta.A << 0.3, 0.3, 0.4, -0.6;
    spec.theta.B.diagonal() << 0.15, 0.2;
    spec.theta.Gamma << -0.1, 0.1;
    spec.R = Eigen::MatrixXd::Identity(2, 2);
    spec.set_r(r);
    return spec;
}

inline mixts::SimConfig bip_sim(int n, std::uint64_t seed) {
    mixts::SimConfig sc;
    sc.n = n;
    sc.seed = seed;
    sc.covariate = mixts::Ar1Covariate{-0.15, 1.0};
    return sc;
}

inline mixts::SimConfig gain_sim(int n, std::uint64_t seed) {
    mixts::SimConfig sc;
    sc.n = n;
    sc.seed = seed;
    return sc;
}

// Central difference of a scalar function along coordinate j.
inline double central_diff(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x, int j,
                           double h) {
    const double x0 = x(j);
    x(j) = x0 + h;
    const double fp = f(x);
    x(j) = x0 - h;
    const double fm = f(x);
    return (fp - fm) / (2.0 * h);
}

inline double sample_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    return ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
}

// Kolmogorov-Smirnov distance of a sample to a continuous CDF.
template <typename Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
    }
    return d;
}

}  // namespace testing_util
