#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mixts {

/// Objective returning f(x) and writing the gradient. A non-finite return
/// marks x as infeasible; the line search then backtracks.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct MinimizeOptions {
    int max_iterations = 2000;
    double gtol = 1e-6;   // projected-gradient infinity norm, scaled by 1 + |f|
    double ftol = 1e-10;  // relative objective change over two consecutive steps
    double armijo = 1e-4;
    int max_backtracks = 60;
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
    std::vector<double> trace;  // objective at every accepted iterate
};

/// Projected quasi-Newton (BFGS on the free variables) for box constraints.
/// Variables held at a bound by the gradient are frozen for the step; the
/// step is projected onto the box and accepted under an Armijo condition, so
/// the accepted objective values never increase.
MinimizeResult minimize_box(const Objective& objective, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const MinimizeOptions& options = {});

}  // namespace mixts
