#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixts/copula.hpp"
#include "mixts/model.hpp"
#include "mixts/optimize.hpp"

namespace mixts {

struct EstimateOptions {
    // Parameters held at a given value, keyed by ParamLayout::name ("A.1.2").
    std::map<std::string, double> fixed;
    std::optional<Eigen::VectorXd> lambda0;
    MinimizeOptions minimize;
    int threads = 1;

    // Box for positive-latent equations: every entry >= d_minus.
    double d_minus = 1e-6;
    double positive_upper = 1e4;
    // Box for real-latent equations: entries in [-real_bound, real_bound].
    double real_bound = 10.0;
    // |B(i,i)| <= 1 - b_margin.
    double b_margin = 1e-6;

    bool compute_sandwich = true;
    bool fit_copula = true;
    std::size_t bip_draws = 10000;
    DrawScheme draw_scheme = DrawScheme::Random;
    std::uint64_t draw_seed = 7;
    FitROptions r_options;
};

/// Per-equation empirical contrast
///   theta^(i) -> (n-1)^{-1} sum_{t>=1} h_{i,Y_{i,t}}(lambda_{i,t}(theta^(i)))
/// over the block (d_i, Gamma(i,.), A(i,.), B(i,i)).
class EquationProblem {
public:
    EquationProblem(int i, const ModelSpec& spec, const SeriesFrame& data, const Eigen::VectorXd& lambda0,
                    const EstimateOptions& options);

    int size() const { return static_cast<int>(lower_.size()); }
    /// Objective and (optionally) its analytic gradient; +inf when the
    /// latent path leaves the family's domain.
    double value(const Eigen::VectorXd& theta_i, Eigen::VectorXd* grad) const;

    const Eigen::VectorXd& lower() const { return lower_; }
    const Eigen::VectorXd& upper() const { return upper_; }
    /// Deterministic starts: moment-matched, small-coefficient, mid-box.
    std::vector<Eigen::VectorXd> starts() const;

private:
    int i_;
    Family family_;
    Eigen::MatrixXd g_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_;
    double lambda0_;
    Eigen::VectorXd lower_, upper_;
    std::vector<std::optional<double>> fixed_;
};

struct EquationFit {
    Eigen::VectorXd theta_i;
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
    int start = -1;
    std::string message;
    std::vector<double> trace;
};

EquationFit fit_equation(int i, const ModelSpec& spec, const SeriesFrame& data, const EstimateOptions& options = {});

struct Sandwich {
    Eigen::MatrixXd I;    // Q x Q, zero rows/cols for pinned parameters
    Eigen::MatrixXd J;
    Eigen::MatrixXd cov;  // J^{-1} I J^{-1} on the free block
    int n_eff = 0;
};

/// Empirical plug-ins of I and J along lambda_bar(theta_hat). `free_mask`
/// selects the estimated coordinates of the stacked parameter vector.
/// Throws CovarianceUnavailableError when J is singular or has condition
/// number above 1e12.
Sandwich sandwich(const ThetaLinear& theta_hat, const ModelSpec& spec, const SeriesFrame& data,
                  const Eigen::VectorXd& lambda0, const std::vector<bool>& free_mask);

struct BoundaryTest {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
};

/// Test of H0: a = 0 against a > 0 for a parameter on the boundary:
/// reject when n a^2 / var exceeds the chi-square(1) quantile at 1 - 2 alpha.
BoundaryTest boundary_test(double a_hat, double var_hat, int n, double alpha);

/// Sum over equations of the per-equation contrasts, evaluated through the
/// joint latent filter.
double total_objective(const ThetaLinear& theta, const ModelSpec& spec, const SeriesFrame& data,
                       const Eigen::VectorXd& lambda0);

/// Probability-integral transforms Z_t = F(Y_t) and Z_t^- = F(Y_t - 1) at the
/// given latent path, for t >= 1. Z^- is left empty for continuous families.
struct PitColumn {
    std::vector<double> z;
    std::vector<double> z_minus;
};
std::vector<PitColumn> pit_columns(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda);

struct CopulaFit {
    double r_hat = 0.0;
    double objective = 0.0;
    std::size_t floored = 0;
    double mc_se = 0.0;
    std::string kind;  // "continuous-discrete", "discrete-discrete", "continuous-continuous"
};

/// Plug-in estimate of the bivariate copula correlation given a latent path.
CopulaFit fit_copula(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda,
                     const EstimateOptions& options = {});

struct FitResult {
    std::vector<Family> families;
    int k = 0;
    int m = 0;
    int n = 0;
    int n_eff = 0;
    ThetaLinear theta_hat;
    std::vector<bool> free_mask;
    Eigen::VectorXd per_equation_objective;
    std::vector<EquationFit> equations;

    bool covariance_available = false;
    std::string covariance_message;
    Eigen::MatrixXd I_hat, J_hat, cov_theta;
    Eigen::VectorXd std_errors;

    std::optional<double> r_hat;
    CopulaFit copula;

    std::optional<double> r_boot_se;
    int bootstrap_B = 0;
    int bootstrap_dropped = 0;
    std::uint64_t bootstrap_seed = 0;

    double loglik = 0.0;
    double aic = 0.0;
    int n_params = 0;

    Eigen::VectorXd lambda0;
    Eigen::MatrixXd lambda_hat;

    bool all_converged() const;
    /// Model with theta_hat and r_hat substituted.
    ModelSpec fitted_spec() const;
};

/// Equation-by-equation pseudo-likelihood fit, sandwich covariance, plug-in
/// copula estimate and the copula-augmented log-likelihood / AIC.
FitResult fit(const ModelSpec& spec, const SeriesFrame& data, const EstimateOptions& options = {});

/// Copula-augmented log-likelihood l_n(theta, r) over t >= 1.
double log_likelihood(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda,
                      const std::optional<double>& r, const EstimateOptions& options = {});

}  // namespace mixts
