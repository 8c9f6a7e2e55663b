#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mixts/rng.hpp"

namespace mixts {

/// Clamp applied to every probability before Phi^{-1}.
inline constexpr double kCopulaClamp = 1e-12;
/// Per-term floor for a nonpositive likelihood contribution.
inline constexpr double kLikelihoodFloor = 1e-300;

class GaussianCopula {
public:
    /// Throws InputError unless R is a symmetric, unit-diagonal, positive
    /// definite correlation matrix.
    explicit GaussianCopula(Eigen::MatrixXd R);
    static GaussianCopula bivariate(double r);

    int k() const { return static_cast<int>(R_.rows()); }
    const Eigen::MatrixXd& correlation() const { return R_; }

    /// n x k matrix of dependent uniforms: correlated normal scores mapped
    /// through Phi.
    Eigen::MatrixXd sample(std::size_t n, RngStream& rng) const;

private:
    Eigen::MatrixXd R_;
    Eigen::MatrixXd chol_;
};

/// Negative copula log-likelihood in r for one continuous coordinate (PIT
/// values z_cont) and one discrete coordinate (interval (z_minus, z]).
/// Phi^{-1} of the inputs is computed once at construction.
class GainObjective {
public:
    GainObjective(std::span<const double> z_cont, std::span<const double> z, std::span<const double> z_minus);

    /// Throws InputError for |r| >= 1. `floored` receives the number of terms
    /// clipped at log(kLikelihoodFloor).
    double operator()(double r, std::size_t* floored = nullptr) const;
    std::size_t size() const { return cont_.size(); }

private:
    std::vector<double> cont_, hi_, lo_;
    std::vector<double> p_hi_, p_lo_;  // clamped probabilities, used at r = 0
};

/// Same for two discrete coordinates. The probability over the "integrated"
/// coordinate's interval is averaged over the supplied uniform draws, which
/// stay fixed across r so the objective is a smooth function of r.
class BipObjective {
public:
    BipObjective(std::span<const double> z, std::span<const double> z_minus, std::span<const double> w,
                 std::span<const double> w_minus, std::span<const double> draws);

    double operator()(double r, std::size_t* floored = nullptr) const;
    /// Monte-Carlo standard error of the objective value at r.
    double mc_standard_error(double r) const;
    std::size_t size() const { return hi_.size(); }

private:
    double score(std::size_t t, std::size_t j) const;

    std::vector<double> hi_, lo_;
    std::vector<double> p_hi_, p_lo_;
    std::vector<double> w_, w_minus_;
    std::vector<double> draws_;
    std::vector<double> scores_;  // n x N cache of Phi^{-1} at the draws, row-major
};

/// Negative Gaussian copula log-density for two continuous coordinates.
class ContinuousPairObjective {
public:
    ContinuousPairObjective(std::span<const double> u, std::span<const double> v);
    double operator()(double r, std::size_t* floored = nullptr) const;

private:
    std::vector<double> a_, b_;
};

double gain_objective(double r, std::span<const double> z_cont, std::span<const double> z,
                      std::span<const double> z_minus, std::size_t* floored = nullptr);

double bip_objective(double r, std::span<const double> z, std::span<const double> z_minus, std::span<const double> w,
                     std::span<const double> w_minus, std::span<const double> draws, std::size_t* floored = nullptr);

enum class DrawScheme { Random, Stratified };

/// N uniforms: i.i.d. from `rng` or the midpoints (j + 1/2)/N.
std::vector<double> make_draws(std::size_t count, DrawScheme scheme, RngStream& rng);

struct FitROptions {
    int grid_points = 41;
    double edge = 1e-4;  // search over [-1 + edge, 1 - edge]
    int bits = 20;       // Brent tolerance 2^(1 - bits), about 2e-6 in r
};

struct RFit {
    double r_hat = 0.0;
    double objective = 0.0;
    std::size_t floored = 0;
};

/// Minimizes a copula objective: best point of a uniform grid, refined by
/// Brent's golden-section/parabolic search on the neighbouring cells. The
/// objective reports floored terms; if every term is floored the data carry
/// no information and EstimationError is thrown.
RFit fit_r(const std::function<double(double, std::size_t*)>& objective, std::size_t terms,
           const FitROptions& options = {});

}  // namespace mixts
