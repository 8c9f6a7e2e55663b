#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mixts/model.hpp"

namespace mixts {

/// Trajectory of the latent process and, on request, its derivatives with
/// respect to the stacked parameter vector (see ParamLayout).
struct LatentPath {
    Eigen::MatrixXd lambda;                          // n x k
    std::vector<Eigen::MatrixXd> dlambda;            // n entries, each k x Q
    std::vector<std::vector<Eigen::MatrixXd>> d2lambda;  // n x k entries, each Q x Q
};

/// Runs the initialized recursion lambda_0 = lambda0,
/// lambda_t = d + B lambda_{t-1} + A g(Y_{t-1}) + Gamma X_{t-1}.
/// `with_derivatives` is 0, 1 or 2; derivative paths start at zero.
/// Throws NumericError naming t and the coordinate if a latent value leaves
/// its family's domain.
LatentPath filter(const ThetaLinear& theta, const ModelSpec& spec, const SeriesFrame& data,
                  const Eigen::VectorXd& lambda0, int with_derivatives);

/// Single-equation path lambda_{i,t} for a diagonal B, with the gradient with
/// respect to theta^(i) = (d_i, Gamma(i,.), A(i,.), B(i,i)).
struct EquationPath {
    Eigen::VectorXd lambda;  // n
    Eigen::MatrixXd grad;    // n x (2 + m + k), empty unless requested
};

/// `g` holds the transformed observations (n x k), `x` the covariates (n x m).
EquationPath filter_equation(int i, const Eigen::VectorXd& theta_i, const Eigen::MatrixXd& g,
                             const Eigen::MatrixXd& x, double lambda0_i, Family family, bool with_gradient);

/// Default deterministic start: componentwise sample mean of g_i(Y_i) for
/// positive-latent families, zero otherwise.
Eigen::VectorXd default_lambda0(const ModelSpec& spec, const SeriesFrame& data);

}  // namespace mixts
