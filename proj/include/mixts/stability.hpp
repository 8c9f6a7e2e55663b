#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixts/model.hpp"

namespace mixts {

/// Largest eigenvalue modulus. Closed form for k <= 2, a dense eigensolver
/// otherwise. Throws InputError for a non-square or non-finite matrix.
double spectral_radius(const Eigen::MatrixXd& M);

/// Two-sided Gelfand bracket for a nonnegative matrix: the n-th roots of the
/// smallest and largest row sums of M^n enclose rho(M).
std::pair<double, double> gelfand_bracket(const Eigen::MatrixXd& M, int power);

struct Identifiability {
    bool i3 = false;
    bool i4 = false;
};

struct StabilityReport {
    double rho_stationarity = 0.0;
    std::optional<double> rho_moment;
    std::optional<double> infnorm_condition;
    // Empty when B is not diagonal ("not assessed").
    std::optional<Identifiability> identifiability;

    bool stationarity_pass() const { return rho_stationarity < 1.0; }
    bool moment_pass() const { return !rho_moment || *rho_moment < 1.0; }
    bool infnorm_pass() const { return !infnorm_condition || *infnorm_condition < 1.0; }
    bool pass() const { return stationarity_pass(); }
};

/// (E|eps|^{2r})^{1/r} for a standard normal eps; (2r-1)!!^{1/r} at integer r.
double normal_even_moment_root(double r);

/// GAIN-type certificate (nonnegative parameters): rho(A + B) and
/// rho(B + A diag(m_r, 1)). The moment factor m_r applies to GaussianGarch
/// coordinates of `families` (default: gaussian_garch, poisson_linear).
StabilityReport check_gain(const ThetaLinear& theta, double r_moment,
                           const std::vector<Family>& families = {Family::GaussianGarch, Family::PoissonLinear});

/// BIP-type certificate (sign-free parameters): rho(|B| + |A| diag(c)) and
/// || |A_bar| + |B| ||_inf, where A_bar zeroes the binary columns of A.
/// The default family order matches the binary-first formulation.
StabilityReport check_bip(const ThetaLinear& theta,
                          const std::vector<Family>& families = {Family::BernoulliLogit, Family::PoissonLog});

/// Sufficient identifiability conditions for diagonal B. I3: every row of
/// [A, Gamma] is non-null. I4: the columns of B^j [A, Gamma], j < k, span R^k.
/// Throws UnsupportedCheckError when B has off-diagonal entries.
Identifiability check_identifiability(const ThetaLinear& theta);

/// Numerical rank by Gaussian elimination with full pivoting; entries below
/// rel_tol * max|entry| count as zero.
int matrix_rank(Eigen::MatrixXd M, double rel_tol = 1e-10);

/// Dispatches on the model's families: the GAIN certificate when every latent
/// domain is positive, the sign-free one otherwise. Fills identifiability
/// when B is diagonal.
StabilityReport check_model(const ModelSpec& spec, double r_moment = 1.0);

/// "key: value" lines with keys rho_stationarity, rho_moment,
/// infnorm_condition, I3, I4 (plus verdict lines).
std::string format_report(const StabilityReport& report);

}  // namespace mixts
