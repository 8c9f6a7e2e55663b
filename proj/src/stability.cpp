#include "mixts/stability.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mixts/error.hpp"

namespace mixts {

double spectral_radius(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw InputError("spectral_radius: matrix must be square");
    if (!M.allFinite()) throw InputError("spectral_radius: non-finite entries");
    const Eigen::Index k = M.rows();
    if (k == 0) return 0.0;
    if (k == 1) return std::abs(M(0, 0));
    if (k == 2) {
        const double half_trace = 0.5 * (M(0, 0) + M(1, 1));
        const double half_gap = 0.5 * (M(0, 0) - M(1, 1));
        // disc = (tr/2)^2 - det, written to avoid cancellation.
        const double disc = half_gap * half_gap + M(0, 1) * M(1, 0);
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            return std::max(std::abs(half_trace + root), std::abs(half_trace - root));
        }
        return std::abs(std::complex<double>(half_trace, std::sqrt(-disc)));
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
    if (solver.info() != Eigen::Success) throw NumericError("spectral_radius: eigensolver failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<double, double> gelfand_bracket(const Eigen::MatrixXd& M, int power) {
    if (M.rows() != M.cols()) throw InputError("gelfand_bracket: matrix must be square");
    if ((M.array() < 0.0).any()) throw PreconditionError("gelfand_bracket: matrix must be nonnegative");
    // Track v = M^n 1 with renormalization, accumulating the log scale.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(M.rows());
    double log_scale = 0.0;
    for (int step = 0; step < power; ++step) {
        v = M * v;
        const double top = v.maxCoeff();
        if (top <= 0.0) return {0.0, 0.0};
        v /= top;
        log_scale += std::log(top);
    }
    const double lo = v.minCoeff();
    const double lower = lo > 0.0 ? std::exp((log_scale + std::log(lo)) / power) : 0.0;
    const double upper = std::exp(log_scale / power);
    return {lower, upper};
}

double normal_even_moment_root(double r) {
    if (!(r >= 1.0)) throw InputError("moment order r must be >= 1");
    // E|eps|^{2r} = 2^r Gamma(r + 1/2) / sqrt(pi).
    const double log_moment = r * std::log(2.0) + std::lgamma(r + 0.5) - 0.5 * std::log(3.14159265358979323846);
    return std::exp(log_moment / r);
}

StabilityReport check_gain(const ThetaLinear& theta, double r_moment, const std::vector<Family>& families) {
    const int k = theta.k();
    if (static_cast<int>(families.size()) != k) throw InputError("check_gain: one family per coordinate required");
    if ((theta.d.array() < 0.0).any() || (theta.A.array() < 0.0).any() || (theta.B.array() < 0.0).any() ||
        (theta.Gamma.array() < 0.0).any()) {
        throw PreconditionError("check_gain: GAIN parameters must be nonnegative");
    }
    StabilityReport report;
    report.rho_stationarity = spectral_radius(theta.A + theta.B);
    const double m_r = normal_even_moment_root(r_moment);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(k);
    for (int i = 0; i < k; ++i)
        if (families[i] == Family::GaussianGarch) scale(i) = m_r;
    report.rho_moment = spectral_radius(theta.B + theta.A * scale.asDiagonal());
    return report;
}

StabilityReport check_bip(const ThetaLinear& theta, const std::vector<Family>& families) {
    const int k = theta.k();
    if (static_cast<int>(families.size()) != k) throw InputError("check_bip: one family per coordinate required");
    Eigen::VectorXd c(k);
    for (int i = 0; i < k; ++i) c(i) = traits(families[i]).lipschitz_c;
    const Eigen::MatrixXd absA = theta.A.cwiseAbs();
    const Eigen::MatrixXd absB = theta.B.cwiseAbs();
    StabilityReport report;
    report.rho_stationarity = spectral_radius(absB + absA * c.asDiagonal());
    Eigen::MatrixXd abar = absA;
    for (int j = 0; j < k; ++j)
        if (traits(families[j]).state_space == StateSpace::Binary) abar.col(j).setZero();
    report.infnorm_condition = (abar + absB).rowwise().sum().maxCoeff();
    return report;
}

int matrix_rank(Eigen::MatrixXd M, double rel_tol) {
    const Eigen::Index rows = M.rows();
    const Eigen::Index cols = M.cols();
    const double max_entry = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
    if (max_entry == 0.0) return 0;
    const double tol = rel_tol * max_entry;
    int rank = 0;
    for (Eigen::Index step = 0; step < std::min(rows, cols); ++step) {
        Eigen::Index pr = 0, pc = 0;
        const double pivot = M.bottomRightCorner(rows - step, cols - step).cwiseAbs().maxCoeff(&pr, &pc);
        if (pivot <= tol) break;
        M.row(step).swap(M.row(step + pr));
        M.col(step).swap(M.col(step + pc));
        for (Eigen::Index r = step + 1; r < rows; ++r) {
            const double factor = M(r, step) / M(step, step);
            M.row(r).tail(cols - step) -= factor * M.row(step).tail(cols - step);
        }
        ++rank;
    }
    return rank;
}

Identifiability check_identifiability(const ThetaLinear& theta) {
    if (!theta.b_is_diagonal()) {
        throw UnsupportedCheckError("identifiability check implemented for diagonal B only (general condition not assessed)");
    }
    const int k = theta.k();
    const int m = theta.m();
    Eigen::MatrixXd c(k, k + m);
    c << theta.A, theta.Gamma;
    Identifiability out;
    out.i3 = true;
    for (int i = 0; i < k; ++i)
        if (c.row(i).cwiseAbs().maxCoeff() == 0.0) out.i3 = false;

    // By Cayley-Hamilton the powers j >= k add no new directions.
    Eigen::MatrixXd stacked(k, k * (k + m));
    Eigen::MatrixXd block = c;
    for (int j = 0; j < k; ++j) {
        stacked.middleCols(j * (k + m), k + m) = block;
        block = theta.B * block;
    }
    out.i4 = matrix_rank(stacked) == k;
    return out;
}

StabilityReport check_model(const ModelSpec& spec, double r_moment) {
    bool all_positive = true;
    for (Family f : spec.families)
        if (traits(f).latent_domain != LatentDomain::PositiveReal) all_positive = false;
    StabilityReport report = all_positive ? check_gain(spec.theta, r_moment, spec.families)
                                          : check_bip(spec.theta, spec.families);
    if (spec.theta.b_is_diagonal()) report.identifiability = check_identifiability(spec.theta);
    return report;
}

std::string format_report(const StabilityReport& report) {
    auto verdict = [](bool ok) { return ok ? "pass" : "fail"; };
    std::ostringstream out;
    out.precision(10);
    out << "rho_stationarity: " << report.rho_stationarity << "\n";
    out << "stationarity: " << verdict(report.stationarity_pass()) << "\n";
    if (report.rho_moment) {
        out << "rho_moment: " << *report.rho_moment << "\n";
        out << "moment: " << verdict(report.moment_pass()) << "\n";
    }
    if (report.infnorm_condition) {
        out << "infnorm_condition: " << *report.infnorm_condition << "\n";
        out << "infnorm: " << verdict(report.infnorm_pass()) << "\n";
    }
    if (report.identifiability) {
        out << "I3: " << (report.identifiability->i3 ? "true" : "false") << "\n";
        out << "I4: " << (report.identifiability->i4 ? "true" : "false") << "\n";
    } else {
        out << "I3: not assessed\n";
        out << "I4: not assessed\n";
    }
    out << "I1: user-asserted\n";
    return out.str();
}

}  // namespace mixts
