#include "mixts/latent.hpp"

#include <sstream>

#include "mixts/error.hpp"

namespace mixts {

namespace {

[[noreturn]] void domain_failure(int t, int i, double value, Family family) {
    std::ostringstream msg;
    msg << "latent value " << value << " at t=" << t << ", coordinate " << i + 1 << " left the domain of "
        << family_name(family);
    throw NumericError(msg.str());
}

}  // namespace

LatentPath filter(const ThetaLinear& theta, const ModelSpec& spec, const SeriesFrame& data,
                  const Eigen::VectorXd& lambda0, int with_derivatives) {
    const int n = data.n();
    const int k = spec.k;
    const int m = spec.m;
    if (n < 1) throw InputError("filter: empty data");
    if (theta.k() != k || theta.m() != m || data.k() != k || data.m() != m || lambda0.size() != k) {
        throw InputError("filter: dimension mismatch");
    }
    if (with_derivatives < 0 || with_derivatives > 2) throw InputError("filter: with_derivatives must be 0, 1 or 2");
    for (int i = 0; i < k; ++i)
        if (!in_latent_domain(spec.families[i], lambda0(i)))
            throw PreconditionError("filter: lambda0 outside the latent domain");

    const Eigen::MatrixXd g = transformed(spec.families, data.y);
    const ParamLayout layout(k, m);
    const int q_size = layout.size();

    LatentPath path;
    path.lambda.resize(n, k);
    path.lambda.row(0) = lambda0.transpose();
    if (with_derivatives >= 1) path.dlambda.assign(n, Eigen::MatrixXd::Zero(k, q_size));
    if (with_derivatives == 2) {
        path.d2lambda.assign(n, std::vector<Eigen::MatrixXd>(k, Eigen::MatrixXd::Zero(q_size, q_size)));
    }

    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(k, q_size);
    for (int t = 1; t < n; ++t) {
        const Eigen::VectorXd prev = path.lambda.row(t - 1).transpose();
        Eigen::VectorXd next = theta.d + theta.B * prev + theta.A * g.row(t - 1).transpose();
        if (m > 0) next += theta.Gamma * data.x.row(t - 1).transpose();
        for (int i = 0; i < k; ++i)
            if (!in_latent_domain(spec.families[i], next(i))) domain_failure(t, i, next(i), spec.families[i]);
        path.lambda.row(t) = next.transpose();

        if (with_derivatives == 0) continue;
        direct.setZero();
        for (int i = 0; i < k; ++i) {
            direct(i, layout.d(i)) = 1.0;
            for (int j = 0; j < m; ++j) direct(i, layout.gamma(i, j)) = data.x(t - 1, j);
            for (int j = 0; j < k; ++j) direct(i, layout.a(i, j)) = g(t - 1, j);
            direct(i, layout.b(i)) = prev(i);
        }
        const Eigen::MatrixXd& dprev = path.dlambda[t - 1];
        path.dlambda[t] = direct + theta.B * dprev;

        if (with_derivatives < 2) continue;
        // Only B enters the recursion multiplicatively, so the direct second
        // derivative terms are confined to the B(l,l) rows and columns.
        for (int l = 0; l < k; ++l) {
            Eigen::MatrixXd& out = path.d2lambda[t][l];
            out.setZero();
            for (int r = 0; r < k; ++r)
                if (theta.B(l, r) != 0.0) out += theta.B(l, r) * path.d2lambda[t - 1][r];
            const int bl = layout.b(l);
            out.row(bl) += dprev.row(l);
            out.col(bl) += dprev.row(l).transpose();
        }
    }
    return path;
}

EquationPath filter_equation(int i, const Eigen::VectorXd& theta_i, const Eigen::MatrixXd& g,
                             const Eigen::MatrixXd& x, double lambda0_i, Family family, bool with_gradient) {
    const int n = static_cast<int>(g.rows());
    const int k = static_cast<int>(g.cols());
    const int m = static_cast<int>(x.cols());
    const int p = 2 + m + k;
    if (theta_i.size() != p) throw InputError("filter_equation: parameter block has the wrong length");
    if (!in_latent_domain(family, lambda0_i)) throw PreconditionError("filter_equation: lambda0 outside the latent domain");

    const double d = theta_i(0);
    const double b = theta_i(p - 1);
    EquationPath path;
    path.lambda.resize(n);
    path.lambda(0) = lambda0_i;
    if (with_gradient) path.grad = Eigen::MatrixXd::Zero(n, p);

    for (int t = 1; t < n; ++t) {
        const double prev = path.lambda(t - 1);
        double next = d + b * prev;
        for (int j = 0; j < m; ++j) next += theta_i(1 + j) * x(t - 1, j);
        for (int j = 0; j < k; ++j) next += theta_i(1 + m + j) * g(t - 1, j);
        if (!in_latent_domain(family, next)) domain_failure(t, i, next, family);
        path.lambda(t) = next;
        if (!with_gradient) continue;
        auto row = path.grad.row(t);
        row = b * path.grad.row(t - 1);
        row(0) += 1.0;
        for (int j = 0; j < m; ++j) row(1 + j) += x(t - 1, j);
        for (int j = 0; j < k; ++j) row(1 + m + j) += g(t - 1, j);
        row(p - 1) += prev;
    }
    return path;
}

Eigen::VectorXd default_lambda0(const ModelSpec& spec, const SeriesFrame& data) {
    Eigen::VectorXd lambda0 = Eigen::VectorXd::Zero(spec.k);
    for (int i = 0; i < spec.k; ++i) {
        if (traits(spec.families[i]).latent_domain != LatentDomain::PositiveReal) continue;
        double sum = 0.0;
        for (int t = 0; t < data.n(); ++t) sum += transform(spec.families[i], data.y(t, i));
        const double mean = sum / data.n();
        lambda0(i) = mean > 0.0 ? mean : 1.0;
    }
    return lambda0;
}

}  // namespace mixts
