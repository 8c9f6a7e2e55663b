#include "mixts/optimize.hpp"

#include <cmath>

#include "mixts/error.hpp"

namespace mixts {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Variables pinned at a bound with the gradient pushing outward.
std::vector<bool> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper) {
    std::vector<bool> active(x.size(), false);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double span = std::max(1.0, std::abs(x(i)));
        const double eps = 1e-12 * span;
        if ((x(i) <= lower(i) + eps && g(i) > 0.0) || (x(i) >= upper(i) - eps && g(i) < 0.0)) active[i] = true;
    }
    return active;
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper) {
    const Eigen::VectorXd moved = project(x - g, lower, upper) - x;
    return moved.size() ? moved.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

MinimizeResult minimize_box(const Objective& objective, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const MinimizeOptions& options) {
    const Eigen::Index p = x0.size();
    if (lower.size() != p || upper.size() != p) throw InputError("minimize_box: bound dimensions differ");
    if ((lower.array() > upper.array()).any()) throw InputError("minimize_box: lower bound exceeds upper bound");

    MinimizeResult result;
    Eigen::VectorXd x = project(x0, lower, upper);
    Eigen::VectorXd g(p);
    double f = objective(x, g);
    ++result.evaluations;
    result.x = x;
    result.f = f;
    if (!std::isfinite(f) || !g.allFinite()) {
        result.message = "infeasible starting point";
        return result;
    }
    result.trace.push_back(f);
    if (p == 0) {
        result.converged = true;
        result.message = "no free parameters";
        return result;
    }

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(p, p);
    bool fresh_h = true;
    int small_steps = 0;
    Eigen::VectorXd g_new(p);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter;
        if (projected_gradient_norm(x, g, lower, upper) <= options.gtol * (1.0 + std::abs(f))) {
            result.converged = true;
            result.message = "projected gradient below tolerance";
            break;
        }

        const std::vector<bool> active = active_set(x, g, lower, upper);
        Eigen::VectorXd g_free = g;
        for (Eigen::Index i = 0; i < p; ++i)
            if (active[i]) g_free(i) = 0.0;
        Eigen::VectorXd dir = -(H * g_free);
        for (Eigen::Index i = 0; i < p; ++i)
            if (active[i]) dir(i) = 0.0;
        if (!(dir.dot(g) < 0.0)) {
            H.setIdentity();
            fresh_h = true;
            dir = -g_free;
        }
        // Keep the first (unscaled) steepest-descent trial step modest.
        double step = fresh_h ? std::min(1.0, 1.0 / std::max(1e-12, dir.cwiseAbs().maxCoeff())) : 1.0;

        bool accepted = false;
        Eigen::VectorXd x_new;
        double f_new = f;
        for (int bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5) {
            x_new = project(x + step * dir, lower, upper);
            if (x_new == x) break;
            f_new = objective(x_new, g_new);
            ++result.evaluations;
            if (std::isfinite(f_new) && g_new.allFinite() && f_new <= f + options.armijo * g.dot(x_new - x)) {
                accepted = true;
                break;
            }
        }

        if (!accepted) {
            if (!fresh_h) {
                H.setIdentity();
                fresh_h = true;
                continue;
            }
            result.message = "line search could not decrease the objective";
            // At a point where no projected descent step helps, the
            // remaining gradient is round-off; treat a tiny one as converged.
            result.converged = projected_gradient_norm(x, g, lower, upper) <= 1e-4 * (1.0 + std::abs(f));
            break;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            if (fresh_h) {
                // Shanno-Phua scaling of the initial inverse Hessian.
                H *= sy / yv.squaredNorm();
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(p, p) - rho * s * yv.transpose();
            H = left * H * left.transpose() + rho * s * s.transpose();
            fresh_h = false;
        }

        const double change = std::abs(f - f_new);
        x = x_new;
        g = g_new;
        f = f_new;
        result.trace.push_back(f);
        small_steps = change <= options.ftol * (1.0 + std::abs(f)) ? small_steps + 1 : 0;
        if (small_steps >= 2) {
            result.converged = true;
            result.message = "objective change below tolerance";
            result.iterations = iter + 1;
            break;
        }
        result.iterations = iter + 1;
    }
    if (result.message.empty()) result.message = "iteration limit reached";
    result.x = x;
    result.f = f;
    return result;
}

}  // namespace mixts
