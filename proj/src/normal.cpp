#include "mixts/normal.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "mixts/error.hpp"

namespace mixts {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
    double acc = 0.0;
    for (double coef : c) acc = acc * x + coef;
    return acc;
}

// Wichura's AS241 (PPND16) coefficients, highest degree first.
constexpr std::array<double, 8> kCentralNum = {
    2.5090809287301226727e+3, 3.3430575583588128105e+4, 6.7265770927008700853e+4,
    4.5921953931549871457e+4, 1.3731693765509461125e+4, 1.9715909503065514427e+3,
    1.3314166789178437745e+2, 3.3871328727963666080e+0};
constexpr std::array<double, 8> kCentralDen = {
    5.2264952788528545610e+3, 2.8729085735721942674e+4, 3.9307895800092710610e+4,
    2.1213794301586595867e+4, 5.3941960214247511077e+3, 6.8718700749205790830e+2,
    4.2313330701600911252e+1, 1.0};
constexpr std::array<double, 8> kNearNum = {
    7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
    1.27045825245236838258e+0, 3.64784832476320460504e+0, 5.76949722146069140550e+0,
    4.63033784615654529590e+0, 1.42343711074968357734e+0};
constexpr std::array<double, 8> kNearDen = {
    1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
    1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e+0,
    2.05319162663775882187e+0, 1.0};
constexpr std::array<double, 8> kTailNum = {
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
    2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e+0,
    5.46378491116411436990e+0, 6.65790464350110377720e+0};
constexpr std::array<double, 8> kTailDen = {
    2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
    7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
    5.99832206555887937690e-1, 1.0};

double ppnd16(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(kCentralNum, r) / horner(kCentralDen, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = horner(kNearNum, r) / horner(kNearDen, r);
    } else {
        r -= 5.0;
        x = horner(kTailNum, r) / horner(kTailDen, r);
    }
    return q < 0.0 ? -x : x;
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InputError("norm_quantile: probability must lie in (0,1), got " + std::to_string(p));
    }
    double x = ppnd16(p);
    // One Newton step against the erfc-based CDF. In the upper tail work with
    // the complement so the residual keeps its relative precision.
    const double dens = norm_pdf(x);
    if (dens > 0.0) {
        const double resid = p < 0.5 ? norm_cdf(x) - p : (1.0 - p) - norm_cdf(-x);
        const double step = resid / dens;
        if (std::isfinite(step)) x -= step;
    }
    return x;
}

double chi2_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) {
        throw InputError("chi2_quantile: need 0 < p < 1 and dof > 0");
    }
    return 2.0 * boost::math::gamma_p_inv(0.5 * dof, p);
}

double log_factorial(double y) {
    static const auto table = [] {
        std::array<double, 128> t{};
        double acc = 0.0;
        t[0] = 0.0;
        for (std::size_t j = 1; j < t.size(); ++j) {
            acc += std::log(static_cast<double>(j));
            t[j] = acc;
        }
        return t;
    }();
    if (y < 128.0) return table[static_cast<std::size_t>(y)];
    // Stirling series for log Gamma(y + 1); truncation error below 1e-16 here.
    const double x = y + 1.0;
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace mixts
