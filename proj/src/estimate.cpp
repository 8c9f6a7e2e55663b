#include "mixts/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mixts/error.hpp"
#include "mixts/latent.hpp"
#include "mixts/normal.hpp"
#include "mixts/parallel.hpp"
#include "mixts/rng.hpp"

namespace mixts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double column_mean(const Eigen::MatrixXd& m, int col) {
    return m.rows() ? m.col(col).mean() : 0.0;
}

// Lower/upper bounds of the equation block (d, Gamma(i,.), A(i,.), B(i,i)).
void equation_box(Family family, int p, const EstimateOptions& o, Eigen::VectorXd& lower, Eigen::VectorXd& upper) {
    lower.resize(p);
    upper.resize(p);
    if (traits(family).latent_domain == LatentDomain::PositiveReal) {
        lower.setConstant(o.d_minus);
        upper.setConstant(o.positive_upper);
        upper(p - 1) = 1.0 - o.b_margin;
    } else {
        lower.setConstant(-o.real_bound);
        upper.setConstant(o.real_bound);
        lower(p - 1) = -(1.0 - o.b_margin);
        upper(p - 1) = 1.0 - o.b_margin;
    }
}

std::vector<bool> free_mask_for(const ParamLayout& layout, const std::map<std::string, double>& fixed) {
    std::vector<bool> mask(layout.size(), true);
    for (const auto& [name, value] : fixed) mask[layout.index_of(name)] = false;
    return mask;
}

struct CopulaProblem {
    std::string kind;
    std::function<double(double, std::size_t*)> objective;
    std::function<double(double)> mc_se;
    std::size_t terms = 0;
    double marginal_loglik = 0.0;
};

double marginal_loglik(Family family, const SeriesFrame& data, const Eigen::MatrixXd& lambda, int col) {
    double sum = 0.0;
    for (int t = 1; t < data.n(); ++t) sum += log_density(family, lambda(t, col), data.y(t, col));
    return sum;
}

std::optional<CopulaProblem> build_copula_problem(const ModelSpec& spec, const SeriesFrame& data,
                                                  const Eigen::MatrixXd& lambda, const EstimateOptions& options) {
    if (spec.k != 2 || data.n() < 2) return std::nullopt;
    const std::vector<PitColumn> pit = pit_columns(spec, data, lambda);
    const bool disc0 = is_discrete(spec.families[0]);
    const bool disc1 = is_discrete(spec.families[1]);
    CopulaProblem problem;
    problem.terms = pit[0].z.size();

    if (disc0 != disc1) {
        const int cont = disc0 ? 1 : 0;
        const int disc = 1 - cont;
        auto obj = std::make_shared<GainObjective>(pit[cont].z, pit[disc].z, pit[disc].z_minus);
        problem.kind = "continuous-discrete";
        problem.objective = [obj](double r, std::size_t* fl) { return (*obj)(r, fl); };
        problem.mc_se = [](double) { return 0.0; };
        problem.marginal_loglik = marginal_loglik(spec.families[cont], data, lambda, cont);
    } else if (disc0 && disc1) {
        // Integrate over the coordinate with the narrower probability
        // intervals; its integrand varies least across the draws.
        auto width = [](const PitColumn& c) {
            double w = 0.0;
            for (std::size_t t = 0; t < c.z.size(); ++t) w += c.z[t] - c.z_minus[t];
            return w;
        };
        const int integrated = width(pit[0]) < width(pit[1]) ? 0 : 1;
        const int outer = 1 - integrated;
        RngStream rng(options.draw_seed, "copula:mc");
        const std::vector<double> draws = make_draws(options.bip_draws, options.draw_scheme, rng);
        auto obj = std::make_shared<BipObjective>(pit[outer].z, pit[outer].z_minus, pit[integrated].z,
                                                  pit[integrated].z_minus, draws);
        problem.kind = "discrete-discrete";
        problem.objective = [obj](double r, std::size_t* fl) { return (*obj)(r, fl); };
        problem.mc_se = [obj](double r) { return obj->mc_standard_error(r); };
        problem.marginal_loglik = marginal_loglik(spec.families[integrated], data, lambda, integrated);
    } else {
        auto obj = std::make_shared<ContinuousPairObjective>(pit[0].z, pit[1].z);
        problem.kind = "continuous-continuous";
        problem.objective = [obj](double r, std::size_t* fl) { return (*obj)(r, fl); };
        problem.mc_se = [](double) { return 0.0; };
        problem.marginal_loglik =
            marginal_loglik(spec.families[0], data, lambda, 0) + marginal_loglik(spec.families[1], data, lambda, 1);
    }
    return problem;
}

double independence_loglik(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda) {
    double sum = 0.0;
    for (int i = 0; i < spec.k; ++i) sum += marginal_loglik(spec.families[i], data, lambda, i);
    return sum;
}

}  // namespace

EquationProblem::EquationProblem(int i, const ModelSpec& spec, const SeriesFrame& data,
                                 const Eigen::VectorXd& lambda0, const EstimateOptions& options)
    : i_(i), family_(spec.families.at(i)), x_(data.x), lambda0_(lambda0(i)) {
    if (data.n() < 2) throw InputError("fit: need at least two observations");
    g_ = transformed(spec.families, data.y);
    y_ = data.y.col(i);
    const ParamLayout layout(spec.k, spec.m);
    const int p = layout.equation_size();
    equation_box(family_, p, options, lower_, upper_);
    fixed_.assign(p, std::nullopt);
    const std::vector<int> idx = layout.equation_indices(i);
    for (int j = 0; j < p; ++j) {
        const auto it = options.fixed.find(layout.name(idx[j]));
        if (it != options.fixed.end()) fixed_[j] = it->second;
    }
    for (const auto& [name, value] : options.fixed) layout.index_of(name);  // reject unknown names
}

double EquationProblem::value(const Eigen::VectorXd& theta_i, Eigen::VectorXd* grad) const {
    EquationPath path;
    try {
        path = filter_equation(i_, theta_i, g_, x_, lambda0_, family_, grad != nullptr);
    } catch (const NumericError&) {
        if (grad) grad->setZero(theta_i.size());
        return kInf;
    }
    const Eigen::Index n = path.lambda.size();
    const double scale = 1.0 / static_cast<double>(n - 1);
    double f = 0.0;
    if (grad) grad->setZero(theta_i.size());
    for (Eigen::Index t = 1; t < n; ++t) {
        f += contrast(family_, path.lambda(t), y_(t), 0);
        if (grad) *grad += contrast(family_, path.lambda(t), y_(t), 1) * path.grad.row(t).transpose();
    }
    if (grad) *grad *= scale;
    return f * scale;
}

std::vector<Eigen::VectorXd> EquationProblem::starts() const {
    const int p = size();
    const int k = static_cast<int>(g_.cols());
    const int m = static_cast<int>(x_.cols());
    const Eigen::Index n = y_.size();
    std::vector<double> gbar(k), xbar(m);
    for (int j = 0; j < k; ++j) gbar[j] = column_mean(g_, j);
    for (int j = 0; j < m; ++j) xbar[j] = column_mean(x_, j);
    const double ybar = y_.mean();

    const bool positive = traits(family_).latent_domain == LatentDomain::PositiveReal;
    double level;  // latent level matching the sample mean
    if (positive) {
        level = std::max(column_mean(g_, i_), 1e-8);
    } else if (family_ == Family::PoissonLog) {
        level = std::log(std::max(ybar, 0.5 / n));
    } else {
        const double pbar = std::clamp(ybar, 0.5 / n, 1.0 - 0.5 / n);
        level = std::log(pbar / (1.0 - pbar));
    }

    auto make = [&](double share, double b, bool zero_d) {
        Eigen::VectorXd s(p);
        double lag_sum = 0.0;
        for (int j = 0; j < m; ++j) {
            double coef = 0.0;
            if (positive) {
                const double ax = std::abs(xbar[j]);
                coef = ax > 1e-12 ? share * level / (ax * (k + m)) : 0.0;
            } else {
                coef = share;
            }
            s(1 + j) = coef;
            lag_sum += coef * xbar[j];
        }
        for (int j = 0; j < k; ++j) {
            double coef;
            if (positive)
                coef = gbar[j] > 1e-12 ? share * level / (gbar[j] * (k + m)) : share;
            else
                coef = share;
            s(1 + m + j) = coef;
            lag_sum += coef * gbar[j];
        }
        s(p - 1) = b;
        double d = level * (1.0 - b) - lag_sum;
        if (positive) d = std::max(d, 0.1 * level * (1.0 - b));
        s(0) = zero_d ? 0.0 : d;
        return s;
    };

    std::vector<Eigen::VectorXd> out;
    if (positive) {
        out = {make(0.05, 0.7, false), make(0.01, 0.1, false), make(0.1, 0.5, false)};
    } else {
        out = {make(0.0, 0.0, false), make(0.01, 0.1, false), make(0.0, 0.0, true)};
    }
    for (auto& s : out) {
        s = s.cwiseMax(lower_).cwiseMin(upper_);
        for (int j = 0; j < p; ++j)
            if (fixed_[j]) s(j) = *fixed_[j];
    }
    return out;
}

EquationFit fit_equation(int i, const ModelSpec& spec, const SeriesFrame& data, const EstimateOptions& options) {
    spec.validate();
    validate_frame(spec, data);
    if (i < 0 || i >= spec.k) throw InputError("fit_equation: coordinate index out of range");
    const Eigen::VectorXd lambda0 = options.lambda0 ? *options.lambda0 : default_lambda0(spec, data);
    const EquationProblem problem(i, spec, data, lambda0, options);
    const int p = problem.size();

    const ParamLayout layout(spec.k, spec.m);
    const std::vector<int> idx = layout.equation_indices(i);
    std::vector<int> free_pos;
    for (int j = 0; j < p; ++j)
        if (!options.fixed.count(layout.name(idx[j]))) free_pos.push_back(j);
    const int nf = static_cast<int>(free_pos.size());

    Eigen::VectorXd lower(nf), upper(nf);
    for (int j = 0; j < nf; ++j) {
        lower(j) = problem.lower()(free_pos[j]);
        upper(j) = problem.upper()(free_pos[j]);
    }

    EquationFit best;
    best.objective = kInf;
    const std::vector<Eigen::VectorXd> starts = problem.starts();
    for (std::size_t s = 0; s < starts.size(); ++s) {
        Eigen::VectorXd full = starts[s];
        auto objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
            for (int j = 0; j < nf; ++j) full(free_pos[j]) = z(j);
            Eigen::VectorXd g_full;
            const double f = problem.value(full, &g_full);
            grad.resize(nf);
            for (int j = 0; j < nf; ++j) grad(j) = g_full(free_pos[j]);
            return f;
        };
        Eigen::VectorXd z0(nf);
        for (int j = 0; j < nf; ++j) z0(j) = starts[s](free_pos[j]);
        const MinimizeResult res = minimize_box(objective, z0, lower, upper, options.minimize);
        if (!std::isfinite(res.f) || !(res.f < best.objective)) continue;
        best.theta_i = starts[s];
        for (int j = 0; j < nf; ++j) best.theta_i(free_pos[j]) = res.x(j);
        best.objective = res.f;
        best.converged = res.converged;
        best.iterations = res.iterations;
        best.start = static_cast<int>(s);
        best.message = res.message;
        best.trace = res.trace;
    }
    if (best.start < 0) {
        throw EstimationError("fit_equation: no feasible starting point for equation " + std::to_string(i + 1));
    }
    return best;
}

Sandwich sandwich(const ThetaLinear& theta_hat, const ModelSpec& spec, const SeriesFrame& data,
                  const Eigen::VectorXd& lambda0, const std::vector<bool>& free_mask) {
    const ParamLayout layout(spec.k, spec.m);
    const int q_size = layout.size();
    if (static_cast<int>(free_mask.size()) != q_size) throw InputError("sandwich: free mask has the wrong length");
    if (!theta_hat.b_is_diagonal()) throw PreconditionError("sandwich: B must be diagonal");
    if (data.n() < 2) throw InputError("sandwich: need at least two observations");
    const LatentPath path = filter(theta_hat, spec, data, lambda0, 1);

    Sandwich out;
    out.n_eff = data.n() - 1;
    out.I = Eigen::MatrixXd::Zero(q_size, q_size);
    out.J = Eigen::MatrixXd::Zero(q_size, q_size);
    Eigen::VectorXd score(q_size);
    for (int t = 1; t < data.n(); ++t) {
        score.setZero();
        const Eigen::MatrixXd& dl = path.dlambda[t];
        for (int i = 0; i < spec.k; ++i) {
            const double s = path.lambda(t, i);
            const double y = data.y(t, i);
            const Eigen::VectorXd grad_i = dl.row(i).transpose();
            score += contrast(spec.families[i], s, y, 1) * grad_i;
            out.J.noalias() += contrast(spec.families[i], s, y, 2) * grad_i * grad_i.transpose();
        }
        out.I.noalias() += score * score.transpose();
    }
    out.I /= out.n_eff;
    out.J /= out.n_eff;

    std::vector<int> free_idx;
    for (int q = 0; q < q_size; ++q) {
        if (free_mask[q]) {
            free_idx.push_back(q);
        } else {
            out.I.row(q).setZero();
            out.I.col(q).setZero();
            out.J.row(q).setZero();
            out.J.col(q).setZero();
        }
    }
    const int nf = static_cast<int>(free_idx.size());
    out.cov = Eigen::MatrixXd::Zero(q_size, q_size);
    if (nf == 0) return out;

    Eigen::MatrixXd jf(nf, nf), inf(nf, nf);
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) {
            jf(a, b) = out.J(free_idx[a], free_idx[b]);
            inf(a, b) = out.I(free_idx[a], free_idx[b]);
        }
    jf = (0.5 * (jf + jf.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jf);
    const Eigen::VectorXd spectrum = eig.eigenvalues();
    const double lo = spectrum.minCoeff();
    const double hi = spectrum.maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
        std::ostringstream msg;
        msg << "sandwich: J is singular or ill-conditioned (possible identifiability failure); spectrum:";
        for (Eigen::Index j = 0; j < spectrum.size(); ++j) msg << " " << spectrum(j);
        throw CovarianceUnavailableError(msg.str());
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(jf);
    const Eigen::MatrixXd left = ldlt.solve(inf);                        // J^{-1} I
    Eigen::MatrixXd cov = ldlt.solve(left.transpose()).transpose();      // J^{-1} I J^{-1}
    cov = (0.5 * (cov + cov.transpose())).eval();
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) out.cov(free_idx[a], free_idx[b]) = cov(a, b);
    return out;
}

BoundaryTest boundary_test(double a_hat, double var_hat, int n, double alpha) {
    if (!(var_hat > 0.0)) throw InputError("boundary_test: variance must be positive");
    if (n < 1) throw InputError("boundary_test: n must be positive");
    if (!(alpha > 0.0 && alpha < 0.5)) throw InputError("boundary_test: alpha must lie in (0, 0.5)");
    BoundaryTest out;
    out.statistic = n * a_hat * a_hat / var_hat;
    out.threshold = chi2_quantile(1.0 - 2.0 * alpha, 1.0);
    out.reject = out.statistic > out.threshold;
    return out;
}

double total_objective(const ThetaLinear& theta, const ModelSpec& spec, const SeriesFrame& data,
                       const Eigen::VectorXd& lambda0) {
    if (data.n() < 2) throw InputError("total_objective: need at least two observations");
    const LatentPath path = filter(theta, spec, data, lambda0, 0);
    double total = 0.0;
    for (int i = 0; i < spec.k; ++i) {
        double eq = 0.0;
        for (int t = 1; t < data.n(); ++t) eq += contrast(spec.families[i], path.lambda(t, i), data.y(t, i), 0);
        total += eq / (data.n() - 1);
    }
    return total;
}

std::vector<PitColumn> pit_columns(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda) {
    std::vector<PitColumn> cols(spec.k);
    for (int i = 0; i < spec.k; ++i) {
        const Family f = spec.families[i];
        for (int t = 1; t < data.n(); ++t) {
            const double s = lambda(t, i);
            const double y = data.y(t, i);
            cols[i].z.push_back(cdf(f, s, y));
            if (is_discrete(f)) cols[i].z_minus.push_back(cdf(f, s, y - 1.0));
        }
    }
    return cols;
}

CopulaFit fit_copula(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda,
                     const EstimateOptions& options) {
    const auto problem = build_copula_problem(spec, data, lambda, options);
    if (!problem) throw InputError("fit_copula: copula fitting needs k = 2 and at least two observations");
    const RFit rf = fit_r(problem->objective, problem->terms, options.r_options);
    CopulaFit out;
    out.r_hat = rf.r_hat;
    out.objective = rf.objective;
    out.floored = rf.floored;
    out.mc_se = problem->mc_se(rf.r_hat);
    out.kind = problem->kind;
    return out;
}

double log_likelihood(const ModelSpec& spec, const SeriesFrame& data, const Eigen::MatrixXd& lambda,
                      const std::optional<double>& r, const EstimateOptions& options) {
    if (!r) return independence_loglik(spec, data, lambda);
    const auto problem = build_copula_problem(spec, data, lambda, options);
    if (!problem) throw InputError("log_likelihood: a copula correlation needs k = 2");
    return problem->marginal_loglik - problem->objective(*r, nullptr);
}

bool FitResult::all_converged() const {
    return std::all_of(equations.begin(), equations.end(), [](const EquationFit& e) { return e.converged; });
}

ModelSpec FitResult::fitted_spec() const {
    ModelSpec spec;
    spec.k = k;
    spec.m = m;
    spec.families = families;
    spec.theta = theta_hat;
    spec.R = Eigen::MatrixXd::Identity(k, k);
    if (r_hat && k == 2) spec.set_r(*r_hat);
    return spec;
}

FitResult fit(const ModelSpec& spec, const SeriesFrame& data, const EstimateOptions& options) {
    spec.validate();
    validate_frame(spec, data);
    if (data.n() < 2) throw InputError("fit: need at least two observations");
    const ParamLayout layout(spec.k, spec.m);

    FitResult out;
    out.families = spec.families;
    out.k = spec.k;
    out.m = spec.m;
    out.n = data.n();
    out.n_eff = data.n() - 1;
    out.free_mask = free_mask_for(layout, options.fixed);
    out.lambda0 = options.lambda0 ? *options.lambda0 : default_lambda0(spec, data);

    EstimateOptions eq_options = options;
    eq_options.lambda0 = out.lambda0;
    out.equations.resize(spec.k);
    parallel_for(static_cast<std::size_t>(spec.k), options.threads,
                 [&](std::size_t i) { out.equations[i] = fit_equation(static_cast<int>(i), spec, data, eq_options); });

    Eigen::VectorXd packed = Eigen::VectorXd::Zero(layout.size());
    out.per_equation_objective.resize(spec.k);
    for (int i = 0; i < spec.k; ++i) {
        const std::vector<int> idx = layout.equation_indices(i);
        for (std::size_t j = 0; j < idx.size(); ++j) packed(idx[j]) = out.equations[i].theta_i(j);
        out.per_equation_objective(i) = out.equations[i].objective;
    }
    out.theta_hat = layout.unpack(packed);
    out.lambda_hat = filter(out.theta_hat, spec, data, out.lambda0, 0).lambda;

    const int q_size = layout.size();
    out.std_errors = Eigen::VectorXd::Zero(q_size);
    if (options.compute_sandwich) {
        try {
            const Sandwich sw = sandwich(out.theta_hat, spec, data, out.lambda0, out.free_mask);
            out.I_hat = sw.I;
            out.J_hat = sw.J;
            out.cov_theta = sw.cov;
            out.std_errors = (sw.cov.diagonal() / static_cast<double>(sw.n_eff)).cwiseMax(0.0).cwiseSqrt();
            out.covariance_available = true;
            out.covariance_message = "ok";
        } catch (const CovarianceUnavailableError& e) {
            out.covariance_message = e.what();
        }
    } else {
        out.covariance_message = "not computed";
    }

    int free_count = 0;
    for (bool f : out.free_mask) free_count += f ? 1 : 0;
    out.n_params = free_count;

    const auto problem = options.fit_copula ? build_copula_problem(spec, data, out.lambda_hat, options) : std::nullopt;
    if (problem) {
        const RFit rf = fit_r(problem->objective, problem->terms, options.r_options);
        out.r_hat = rf.r_hat;
        out.copula.r_hat = rf.r_hat;
        out.copula.objective = rf.objective;
        out.copula.floored = rf.floored;
        out.copula.mc_se = problem->mc_se(rf.r_hat);
        out.copula.kind = problem->kind;
        out.loglik = problem->marginal_loglik - rf.objective;
        out.n_params += 1;
    } else {
        out.loglik = independence_loglik(spec, data, out.lambda_hat);
    }
    out.aic = -2.0 * out.loglik + 2.0 * out.n_params;
    return out;
}

}  // namespace mixts
