#include "mixts/copula.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "mixts/error.hpp"
#include "mixts/normal.hpp"

namespace mixts {

namespace {

double clamp_prob(double p) { return std::clamp(p, kCopulaClamp, 1.0 - kCopulaClamp); }

double probit(double p) { return norm_quantile(clamp_prob(p)); }

void check_r(double r) {
    if (!(std::abs(r) < 1.0)) throw InputError("copula correlation must satisfy |r| < 1");
}

// Neumaier-compensated sum keeps results reproducible to the last bit
// regardless of n.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double floored_log(double term, std::size_t& floored) {
    if (!(term > kLikelihoodFloor) || !std::isfinite(term)) {
        ++floored;
        return std::log(kLikelihoodFloor);
    }
    return std::log(term);
}

void check_pairs(std::span<const double> z, std::span<const double> z_minus) {
    if (z.size() != z_minus.size()) throw InputError("copula objective: Z and Z- lengths differ");
    for (std::size_t t = 0; t < z.size(); ++t)
        if (z_minus[t] > z[t]) throw InputError("copula objective: Z- exceeds Z");
}

}  // namespace

GaussianCopula::GaussianCopula(Eigen::MatrixXd R) : R_(std::move(R)) {
    if (R_.rows() != R_.cols() || R_.rows() < 1) throw InputError("copula correlation must be square");
    for (Eigen::Index i = 0; i < R_.rows(); ++i) {
        if (R_(i, i) != 1.0) throw InputError("copula correlation must have unit diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            if (R_(i, j) != R_(j, i) || !(std::abs(R_(i, j)) < 1.0)) throw InputError("invalid copula correlation");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(R_);
    if (llt.info() != Eigen::Success) throw InputError("copula correlation is not positive definite");
    chol_ = llt.matrixL();
}

GaussianCopula GaussianCopula::bivariate(double r) {
    check_r(r);
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(2, 2);
    R(0, 1) = R(1, 0) = r;
    return GaussianCopula(R);
}

Eigen::MatrixXd GaussianCopula::sample(std::size_t n, RngStream& rng) const {
    const int k = this->k();
    Eigen::MatrixXd u(n, k);
    Eigen::VectorXd xi(k);
    for (std::size_t t = 0; t < n; ++t) {
        for (int i = 0; i < k; ++i) xi(i) = rng.normal();
        const Eigen::VectorXd z = chol_ * xi;
        for (int i = 0; i < k; ++i) u(t, i) = std::clamp(norm_cdf(z(i)), 0x1.0p-1074, 1.0 - 0x1.0p-53);
    }
    return u;
}

GainObjective::GainObjective(std::span<const double> z_cont, std::span<const double> z,
                             std::span<const double> z_minus) {
    if (z_cont.size() != z.size()) throw InputError("gain_objective: column lengths differ");
    check_pairs(z, z_minus);
    cont_.reserve(z.size());
    hi_.reserve(z.size());
    lo_.reserve(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) {
        cont_.push_back(probit(z_cont[t]));
        hi_.push_back(probit(z[t]));
        lo_.push_back(probit(z_minus[t]));
        p_hi_.push_back(clamp_prob(z[t]));
        p_lo_.push_back(clamp_prob(z_minus[t]));
    }
}

double GainObjective::operator()(double r, std::size_t* floored) const {
    check_r(r);
    const double s = std::sqrt(1.0 - r * r);
    std::size_t count = 0;
    CompensatedSum sum;
    for (std::size_t t = 0; t < cont_.size(); ++t) {
        const double shift = r * cont_[t];
        const double term =
            r == 0.0 ? p_hi_[t] - p_lo_[t] : norm_cdf((hi_[t] - shift) / s) - norm_cdf((lo_[t] - shift) / s);
        sum.add(floored_log(term, count));
    }
    if (floored) *floored = count;
    return -sum.value();
}

BipObjective::BipObjective(std::span<const double> z, std::span<const double> z_minus, std::span<const double> w,
                           std::span<const double> w_minus, std::span<const double> draws)
    : w_(w.begin(), w.end()), w_minus_(w_minus.begin(), w_minus.end()), draws_(draws.begin(), draws.end()) {
    if (z.size() != w.size()) throw InputError("bip_objective: column lengths differ");
    if (draws.empty()) throw InputError("bip_objective: need at least one Monte-Carlo draw");
    check_pairs(z, z_minus);
    check_pairs(w, w_minus);
    for (double u : draws)
        if (!(u >= 0.0 && u <= 1.0)) throw InputError("bip_objective: draws must lie in [0, 1]");
    hi_.reserve(z.size());
    lo_.reserve(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) {
        hi_.push_back(probit(z[t]));
        lo_.push_back(probit(z_minus[t]));
        p_hi_.push_back(clamp_prob(z[t]));
        p_lo_.push_back(clamp_prob(z_minus[t]));
    }
    // The scores do not depend on r; cache them unless the table is huge.
    constexpr std::size_t kCacheLimit = std::size_t{1} << 23;
    if (z.size() * draws_.size() <= kCacheLimit) {
        scores_.resize(z.size() * draws_.size());
        for (std::size_t t = 0; t < z.size(); ++t)
            for (std::size_t j = 0; j < draws_.size(); ++j)
                scores_[t * draws_.size() + j] = probit(w_[t] - draws_[j] * (w_[t] - w_minus_[t]));
    }
}

double BipObjective::score(std::size_t t, std::size_t j) const {
    if (!scores_.empty()) return scores_[t * draws_.size() + j];
    return probit(w_[t] - draws_[j] * (w_[t] - w_minus_[t]));
}

double BipObjective::operator()(double r, std::size_t* floored) const {
    check_r(r);
    const double s = std::sqrt(1.0 - r * r);
    const std::size_t n_draws = draws_.size();
    std::size_t count = 0;
    CompensatedSum sum;
    for (std::size_t t = 0; t < hi_.size(); ++t) {
        double term;
        if (r == 0.0) {
            term = p_hi_[t] - p_lo_[t];
        } else {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_draws; ++j) {
                const double shift = r * score(t, j);
                acc += norm_cdf((hi_[t] - shift) / s) - norm_cdf((lo_[t] - shift) / s);
            }
            term = acc / static_cast<double>(n_draws);
        }
        sum.add(floored_log(term, count));
    }
    if (floored) *floored = count;
    return -sum.value();
}

double BipObjective::mc_standard_error(double r) const {
    check_r(r);
    if (r == 0.0 || draws_.size() < 2) return 0.0;
    const double s = std::sqrt(1.0 - r * r);
    const double n_draws = static_cast<double>(draws_.size());
    // All terms share the draws, so the error is linearised jointly:
    // sum_t log(mean_j v_tj) moves by mean_j c_j with c_j = sum_t v_tj / mean_t.
    auto term = [&](std::size_t t, std::size_t j) {
        const double shift = r * score(t, j);
        return norm_cdf((hi_[t] - shift) / s) - norm_cdf((lo_[t] - shift) / s);
    };
    std::vector<double> means(hi_.size(), 0.0);
    for (std::size_t t = 0; t < hi_.size(); ++t) {
        for (std::size_t j = 0; j < draws_.size(); ++j) means[t] += term(t, j);
        means[t] /= n_draws;
    }
    std::vector<double> c(draws_.size(), 0.0);
    for (std::size_t t = 0; t < hi_.size(); ++t) {
        if (!(means[t] > kLikelihoodFloor)) continue;
        for (std::size_t j = 0; j < draws_.size(); ++j) c[j] += term(t, j) / means[t];
    }
    double mean = 0.0, sq = 0.0;
    for (double cj : c) mean += cj;
    mean /= n_draws;
    for (double cj : c) sq += (cj - mean) * (cj - mean);
    return std::sqrt(sq / (n_draws - 1.0) / n_draws);
}

ContinuousPairObjective::ContinuousPairObjective(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw InputError("continuous copula objective: column lengths differ");
    for (std::size_t t = 0; t < u.size(); ++t) {
        a_.push_back(probit(u[t]));
        b_.push_back(probit(v[t]));
    }
}

double ContinuousPairObjective::operator()(double r, std::size_t* floored) const {
    check_r(r);
    const double one_minus = 1.0 - r * r;
    CompensatedSum sum;
    for (std::size_t t = 0; t < a_.size(); ++t) {
        const double quad = (r * r * (a_[t] * a_[t] + b_[t] * b_[t]) - 2.0 * r * a_[t] * b_[t]) / (2.0 * one_minus);
        sum.add(-0.5 * std::log(one_minus) - quad);
    }
    if (floored) *floored = 0;
    return -sum.value();
}

double gain_objective(double r, std::span<const double> z_cont, std::span<const double> z,
                      std::span<const double> z_minus, std::size_t* floored) {
    return GainObjective(z_cont, z, z_minus)(r, floored);
}

double bip_objective(double r, std::span<const double> z, std::span<const double> z_minus, std::span<const double> w,
                     std::span<const double> w_minus, std::span<const double> draws, std::size_t* floored) {
    return BipObjective(z, z_minus, w, w_minus, draws)(r, floored);
}

std::vector<double> make_draws(std::size_t count, DrawScheme scheme, RngStream& rng) {
    std::vector<double> draws(count);
    for (std::size_t j = 0; j < count; ++j)
        draws[j] = scheme == DrawScheme::Random ? rng.uniform() : (static_cast<double>(j) + 0.5) / static_cast<double>(count);
    return draws;
}

RFit fit_r(const std::function<double(double, std::size_t*)>& objective, std::size_t terms,
           const FitROptions& options) {
    if (options.grid_points < 3) throw InputError("fit_r: need at least 3 grid points");
    const double lo = -1.0 + options.edge;
    const double hi = 1.0 - options.edge;
    const int g = options.grid_points;
    std::vector<double> grid(g), values(g);
    std::size_t best = 0;
    std::size_t min_floored = terms;
    for (int j = 0; j < g; ++j) {
        grid[j] = lo + (hi - lo) * j / (g - 1);
        std::size_t floored = 0;
        values[j] = objective(grid[j], &floored);
        min_floored = std::min(min_floored, floored);
        if (values[j] < values[best]) best = j;
    }
    if (terms > 0 && min_floored >= terms) throw EstimationError("fit_r: every likelihood term is degenerate");

    const double left = grid[best == 0 ? 0 : best - 1];
    const double right = grid[best + 1 == grid.size() ? best : best + 1];
    auto f = [&](double r) { return objective(r, nullptr); };
    auto [r_hat, value] = boost::math::tools::brent_find_minima(f, left, right, options.bits);
    RFit fit;
    if (values[best] < value) {
        r_hat = grid[best];
        value = values[best];
    }
    fit.r_hat = r_hat;
    fit.objective = value;
    objective(r_hat, &fit.floored);
    return fit;
}

}  // namespace mixts
