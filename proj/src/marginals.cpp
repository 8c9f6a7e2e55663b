#include "mixts/marginals.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mixts/error.hpp"
#include "mixts/normal.hpp"

namespace mixts {

namespace {

double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

double logistic(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

bool is_integer(double y) { return std::isfinite(y) && std::floor(y) == y; }

void require_latent(Family family, double s, const char* op) {
    if (!in_latent_domain(family, s)) {
        std::ostringstream msg;
        msg << op << ": latent value " << s << " outside the domain of " << family_name(family);
        throw PreconditionError(msg.str());
    }
}

void require_observation(Family family, double y, const char* op) {
    if (!in_state_space(family, y)) {
        std::ostringstream msg;
        msg << op << ": observation " << y << " outside the state space of " << family_name(family);
        throw InputError(msg.str());
    }
}

double poisson_mean(Family family, double s) { return family == Family::PoissonLinear ? s : std::exp(s); }

// Running cumulative Poisson probabilities, accumulated in the same order by
// both cdf() and quantile() so that the generalized-inverse identities hold
// exactly in floating point.
class PoissonCumulator {
public:
    explicit PoissonCumulator(double mean) : log_mean_(std::log(mean)), log_pmf_(-mean), sum_(std::exp(-mean)) {}

    double value() const { return sum_; }
    long index() const { return j_; }

    void advance() {
        ++j_;
        log_pmf_ += log_mean_ - std::log(static_cast<double>(j_));
        sum_ += std::exp(log_pmf_);
        if (sum_ > 1.0) sum_ = 1.0;
    }

private:
    double log_mean_;
    double log_pmf_;
    double sum_;
    long j_ = 0;
};

// Above this mean the running sum is replaced by the regularized incomplete
// gamma function, P(X <= y) = Q(y + 1, mean).
constexpr double kDirectSumMaxMean = 1e4;

double poisson_cdf_gamma(double mean, double y) { return boost::math::gamma_q(y + 1.0, mean); }

// Smallest y with P(X <= y) >= u under poisson_cdf_gamma.
double poisson_quantile_gamma(double mean, double u) {
    using Policy = boost::math::policies::policy<
        boost::math::policies::discrete_quantile<boost::math::policies::integer_round_up>>;
    double q = boost::math::quantile(boost::math::poisson_distribution<double, Policy>(mean), u);
    while (poisson_cdf_gamma(mean, q) < u) q += 1.0;
    while (q > 0.0 && poisson_cdf_gamma(mean, q - 1.0) >= u) q -= 1.0;
    return q;
}

}  // namespace

FamilyTraits traits(Family family) {
    switch (family) {
        case Family::GaussianGarch: return {StateSpace::Real, LatentDomain::PositiveReal, 1.0};
        case Family::PoissonLinear: return {StateSpace::Count, LatentDomain::PositiveReal, 1.0};
        case Family::PoissonLog: return {StateSpace::Count, LatentDomain::Real, 1.0};
        case Family::BernoulliLogit: return {StateSpace::Binary, LatentDomain::Real, 0.25};
    }
    throw InputError("unknown family");
}

std::string_view family_name(Family family) {
    switch (family) {
        case Family::GaussianGarch: return "gaussian_garch";
        case Family::PoissonLinear: return "poisson_linear";
        case Family::PoissonLog: return "poisson_log";
        case Family::BernoulliLogit: return "bernoulli_logit";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::GaussianGarch, Family::PoissonLinear, Family::PoissonLog, Family::BernoulliLogit}) {
        if (family_name(f) == name) return f;
    }
    throw InputError("unknown marginal family '" + std::string(name) + "'");
}

bool is_discrete(Family family) { return traits(family).state_space != StateSpace::Real; }

bool in_latent_domain(Family family, double s) {
    if (!std::isfinite(s)) return false;
    return traits(family).latent_domain == LatentDomain::Real || s > 0.0;
}

bool in_state_space(Family family, double y) {
    switch (traits(family).state_space) {
        case StateSpace::Real: return std::isfinite(y);
        case StateSpace::Count: return is_integer(y) && y >= 0.0;
        case StateSpace::Binary: return y == 0.0 || y == 1.0;
    }
    return false;
}

double cdf(Family family, double s, double y) {
    require_latent(family, s, "cdf");
    if (family == Family::GaussianGarch) {
        if (std::isnan(y)) throw InputError("cdf: NaN observation");
        return norm_cdf(y / std::sqrt(s));
    }
    if (!is_integer(y)) throw InputError("cdf: discrete family evaluated at non-integer " + std::to_string(y));
    if (y < 0.0) return 0.0;
    if (family == Family::BernoulliLogit) return y >= 1.0 ? 1.0 : logistic(-s);

    const double mean = poisson_mean(family, s);
    if (mean > kDirectSumMaxMean) return poisson_cdf_gamma(mean, y);
    PoissonCumulator acc(mean);
    const long target = static_cast<long>(y);
    while (acc.index() < target && acc.value() < 1.0) acc.advance();
    return acc.value();
}

double quantile(Family family, double s, double u) {
    require_latent(family, s, "quantile");
    if (!(u > 0.0 && u < 1.0)) throw InputError("quantile: probability must lie in (0,1), got " + std::to_string(u));
    switch (family) {
        case Family::GaussianGarch: return std::sqrt(s) * norm_quantile(u);
        case Family::BernoulliLogit: return logistic(-s) >= u ? 0.0 : 1.0;
        case Family::PoissonLinear:
        case Family::PoissonLog: {
            const double mean = poisson_mean(family, s);
            const double cap = poisson_search_cap(mean);
            if (!std::isfinite(cap) || cap > 1e9) {
                std::ostringstream msg;
                msg << "quantile: Poisson mean " << mean << " exceeds the search bound y <= 1e9";
                throw OverflowError(msg.str());
            }
            if (mean > kDirectSumMaxMean) return poisson_quantile_gamma(mean, u);
            PoissonCumulator acc(mean);
            while (acc.value() < u) {
                if (static_cast<double>(acc.index()) >= cap) {
                    std::ostringstream msg;
                    msg << "quantile: Poisson search exceeded bound y <= " << cap << " (mean " << mean << ", u " << u << ")";
                    throw OverflowError(msg.str());
                }
                acc.advance();
            }
            return static_cast<double>(acc.index());
        }
    }
    throw InputError("unknown family");
}

double transform(Family family, double y) {
    require_observation(family, y, "transform");
    switch (family) {
        case Family::GaussianGarch: return y * y;
        case Family::PoissonLog: return std::log1p(y);
        case Family::PoissonLinear:
        case Family::BernoulliLogit: return y;
    }
    return y;
}

double contrast(Family family, double s, double y, int order) {
    require_latent(family, s, "contrast");
    if (order < 0 || order > 2) throw InputError("contrast: order must be 0, 1 or 2");
    switch (family) {
        case Family::GaussianGarch: {
            const double y2 = y * y;
            if (order == 0) return y2 / s + std::log(s);
            if (order == 1) return 1.0 / s - y2 / (s * s);
            return 2.0 * y2 / (s * s * s) - 1.0 / (s * s);
        }
        case Family::PoissonLinear:
            if (order == 0) return y == 0.0 ? s : s - y * std::log(s);
            if (order == 1) return 1.0 - y / s;
            return y / (s * s);
        case Family::PoissonLog: {
            const double e = std::exp(s);
            if (order == 0) return e - y * s;
            if (order == 1) return e - y;
            return e;
        }
        case Family::BernoulliLogit: {
            if (order == 0) return softplus(s) - y * s;
            const double p = logistic(s);
            if (order == 1) return p - y;
            return p * (1.0 - p);
        }
    }
    return 0.0;
}

double log_density(Family family, double s, double y) {
    require_latent(family, s, "log_density");
    require_observation(family, y, "log_density");
    switch (family) {
        case Family::GaussianGarch:
            return -0.5 * std::log(2.0 * 3.14159265358979323846 * s) - 0.5 * y * y / s;
        case Family::PoissonLinear:
            return -s + (y == 0.0 ? 0.0 : y * std::log(s)) - log_factorial(y);
        case Family::PoissonLog: return -std::exp(s) + y * s - log_factorial(y);
        case Family::BernoulliLogit: return y * s - softplus(s);
    }
    return 0.0;
}

double conditional_mean(Family family, double s) {
    require_latent(family, s, "conditional_mean");
    switch (family) {
        case Family::GaussianGarch: return 0.0;
        case Family::PoissonLinear: return s;
        case Family::PoissonLog: return std::exp(s);
        case Family::BernoulliLogit: return logistic(s);
    }
    return 0.0;
}

double poisson_search_cap(double mean) { return std::floor(mean + 20.0 * std::sqrt(mean) + 200.0); }

}  // namespace mixts
