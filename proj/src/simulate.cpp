#include "mixts/simulate.hpp"

#include <cmath>
#include <sstream>

#include "mixts/copula.hpp"
#include "mixts/error.hpp"
#include "mixts/marginals.hpp"
#include "mixts/stability.hpp"

namespace mixts {

void SimConfig::validate() const {
    if (n < 1) throw InputError("simulation length n must be >= 1");
    if (burn_in < 0) throw InputError("burn_in must be >= 0");
    if (const auto* ar = std::get_if<Ar1Covariate>(&covariate)) {
        if (!(std::abs(ar->phi) < 1.0)) throw InputError("AR(1) covariate needs |phi| < 1");
        if (!(ar->sigma >= 0.0)) throw InputError("AR(1) covariate needs sigma >= 0");
    }
}

Eigen::VectorXd gen_ar1(int n, double phi, double sigma, RngStream& rng) {
    if (!(std::abs(phi) < 1.0)) throw InputError("gen_ar1: |phi| must be < 1");
    if (n < 0) throw InputError("gen_ar1: negative length");
    Eigen::VectorXd x(n);
    if (n == 0) return x;
    x(0) = sigma / std::sqrt(1.0 - phi * phi) * rng.normal();
    for (int t = 1; t < n; ++t) x(t) = phi * x(t - 1) + sigma * rng.normal();
    return x;
}

Eigen::VectorXd stationary_start(const ModelSpec& spec) {
    const int k = spec.k;
    Eigen::VectorXd start = Eigen::VectorXd::Zero(k);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(k, k) - spec.theta.B;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
    if (lu.isInvertible()) start = lu.solve(spec.theta.d);
    for (int i = 0; i < k; ++i) {
        const bool positive = traits(spec.families[i]).latent_domain == LatentDomain::PositiveReal;
        if (!std::isfinite(start(i))) start(i) = positive ? 1.0 : 0.0;
        if (positive && start(i) <= 0.0) start(i) = spec.theta.d(i) > 0.0 ? spec.theta.d(i) : 1.0;
    }
    return start;
}

SimResult simulate(const ModelSpec& spec, const SimConfig& config) {
    spec.validate();
    config.validate();
    if (!config.override_stability) {
        const StabilityReport report = check_model(spec);
        if (!report.pass()) {
            std::ostringstream msg;
            msg << "refusing to simulate: stationarity condition fails (rho = " << report.rho_stationarity
                << " >= 1); pass --override-stability to force";
            throw RefusalError(msg.str());
        }
    }

    const int k = spec.k;
    const int m = spec.m;
    const int total = config.burn_in + config.n;
    RngStream root(config.seed);
    RngStream copula_rng = root.substream("copula");
    RngStream covariate_rng = root.substream("covariate");

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, m);
    if (m > 0) {
        if (const auto* ar = std::get_if<Ar1Covariate>(&config.covariate)) {
            for (int j = 0; j < m; ++j) x.col(j) = gen_ar1(total, ar->phi, ar->sigma, covariate_rng);
        } else if (const auto* fixed = std::get_if<FixedCovariate>(&config.covariate)) {
            if (fixed->x.cols() != m || fixed->x.rows() < config.n) {
                throw InputError("fixed covariates must have m columns and at least n rows");
            }
            for (int t = 0; t < config.burn_in; ++t) x.row(t) = fixed->x.row(0);
            x.bottomRows(config.n) = fixed->x.topRows(config.n);
        } else {
            throw InputError("model has covariates (m > 0) but no covariate process was configured");
        }
    }

    const GaussianCopula copula(spec.R);
    const Eigen::MatrixXd u = copula.sample(static_cast<std::size_t>(total), copula_rng);

    Eigen::MatrixXd y(total, k);
    Eigen::MatrixXd lambda(total, k);
    Eigen::VectorXd current = stationary_start(spec);
    Eigen::VectorXd gbar(k);
    for (int t = 0; t < total; ++t) {
        lambda.row(t) = current.transpose();
        for (int i = 0; i < k; ++i) {
            try {
                y(t, i) = quantile(spec.families[i], current(i), u(t, i));
            } catch (const NumericError& e) {
                throw OverflowError("simulate: at t=" + std::to_string(t) + ", coordinate " + std::to_string(i + 1) +
                                    ": " + e.what());
            } catch (const PreconditionError&) {
                throw NumericError("simulate: latent value left the domain at t=" + std::to_string(t) +
                                   ", coordinate " + std::to_string(i + 1));
            }
            gbar(i) = transform(spec.families[i], y(t, i));
        }
        current = spec.theta.d + spec.theta.B * current + spec.theta.A * gbar;
        if (m > 0) current += spec.theta.Gamma * x.row(t).transpose();
        if (!current.allFinite()) throw NumericError("simulate: latent path diverged at t=" + std::to_string(t));
    }

    SimResult out;
    out.frame.y = y.bottomRows(config.n);
    out.frame.x = x.bottomRows(config.n);
    out.lambda = lambda.bottomRows(config.n);
    return out;
}

}  // namespace mixts
