#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

#include "mixts/model.hpp"
#include "mixts/rng.hpp"

namespace mixts {

struct NoCovariate {};

struct Ar1Covariate {
    double phi = 0.0;
    double sigma = 1.0;
};

/// Observed covariates reused as-is (n rows needed; the burn-in repeats row 0).
struct FixedCovariate {
    Eigen::MatrixXd x;
};

using CovariateProcess = std::variant<NoCovariate, Ar1Covariate, FixedCovariate>;

struct SimConfig {
    int n = 1000;
    int burn_in = 500;
    std::uint64_t seed = 1;
    CovariateProcess covariate = NoCovariate{};
    bool override_stability = false;

    void validate() const;
};

struct SimResult {
    SeriesFrame frame;
    Eigen::MatrixXd lambda;  // true latent path aligned with frame rows
};

/// Stationary AR(1): X_0 ~ N(0, sigma^2 / (1 - phi^2)), X_t = phi X_{t-1} + sigma xi_t.
Eigen::VectorXd gen_ar1(int n, double phi, double sigma, RngStream& rng);

/// Generates a path from the model. Copula innovations and covariates use
/// the independent sub-streams "copula" and "covariate" of config.seed.
/// Throws RefusalError for a parameter failing its stationarity certificate
/// unless config.override_stability is set.
SimResult simulate(const ModelSpec& spec, const SimConfig& config);

/// Fixed point (I - B)^{-1} d, moved into the latent domain coordinatewise.
Eigen::VectorXd stationary_start(const ModelSpec& spec);

}  // namespace mixts
