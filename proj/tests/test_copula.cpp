#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "common.hpp"
#include "mixts/copula.hpp"
#include "mixts/error.hpp"
#include "mixts/estimate.hpp"
#include "mixts/normal.hpp"
#include "mixts/rng.hpp"
#include "mixts/simulate.hpp"

using namespace mixts;

namespace {

struct Pairs {
    std::vector<double> z, zm;
};

Pairs random_pairs(std::size_t n, RngStream& rng) {
    Pairs p;
    for (std::size_t t = 0; t < n; ++t) {
        const double a = 0.01 + 0.98 * rng.uniform(), b = 0.01 + 0.98 * rng.uniform();
        p.z.push_back(std::max(a, b));
        p.zm.push_back(std::min(a, b) * (t % 5 == 0 ? 0.0 : 1.0));
    }
    return p;
}

double independence_value(const Pairs& p) {
    double s = 0.0;
    for (std::size_t t = 0; t < p.z.size(); ++t) s -= std::log(p.z[t] - p.zm[t]);
    return s;
}

double grid_argmin(const std::function<double(double)>& f) {
    double best = 0.0, best_v = INFINITY;
    for (int j = -99; j <= 99; ++j) {
        const double r = j / 100.0;
        const double v = f(r);
        if (v < best_v) {
            best_v = v;
            best = r;
        }
    }
    return best;
}

}  // namespace

TEST(Copula, IndependenceValueIsExact) {
    RngStream rng(1, "pairs");
    for (int rep = 0; rep < 20; ++rep) {
        const Pairs count = random_pairs(500, rng);
        const Pairs other = random_pairs(500, rng);
        std::vector<double> cont(500);
        for (auto& c : cont) c = rng.uniform();
        std::vector<double> draws(50);
        for (auto& d : draws) d = rng.uniform();
        const double want = independence_value(count);
        EXPECT_NEAR(gain_objective(0.0, cont, count.z, count.zm), want, 1e-12 * std::abs(want));
        EXPECT_NEAR(bip_objective(0.0, count.z, count.zm, other.z, other.zm, draws), want, 1e-12 * std::abs(want));
    }
}

TEST(Copula, SingleObservation) {
    const std::vector<double> cont = {0.37}, z = {0.8}, zm = {0.3};
    EXPECT_NEAR(gain_objective(0.0, cont, z, zm), -std::log(0.5), 1e-15);
    EXPECT_NEAR(gain_objective(0.0, cont, z, zm), 0.693147, 1e-6);
}

TEST(Copula, RejectsInvalidR) {
    const std::vector<double> cont = {0.37}, z = {0.8}, zm = {0.3};
    EXPECT_THROW(gain_objective(1.0, cont, z, zm), InputError);
    EXPECT_THROW(gain_objective(-1.5, cont, z, zm), InputError);
    EXPECT_THROW(GaussianCopula::bivariate(1.0), InputError);
    Eigen::Matrix3d R;
    R << 1, 0.9, 0.9, 0.9, 1, -0.9, 0.9, -0.9, 1;
    EXPECT_THROW(GaussianCopula{R}, InputError);
}

TEST(Copula, ReflectionSymmetry) {
    RngStream rng(2, "reflect");
    const Pairs count = random_pairs(300, rng);
    std::vector<double> cont(300), flipped(300);
    for (int t = 0; t < 300; ++t) {
        cont[t] = rng.uniform();
        flipped[t] = 1.0 - cont[t];
    }
    for (double r : {-0.8, -0.3, 0.2, 0.65, 0.95}) {
        const double a = gain_objective(r, cont, count.z, count.zm);
        const double b = gain_objective(-r, flipped, count.z, count.zm);
        EXPECT_NEAR(a, b, 1e-9 * std::abs(a)) << r;
    }
}

TEST(Copula, ContinuousOnDegenerateInput) {
    // Z at the edges and empty intervals must floor, not produce NaN.
    const std::vector<double> cont = {0.0, 1.0, 0.5, 1e-300}, z = {1.0, 0.4, 0.4, 1.0}, zm = {0.0, 0.4, 0.1, 1.0};
    std::vector<double> draws = {0.1, 0.5, 0.9};
    for (double r = -0.999; r <= 0.999; r += 0.037) {
        std::size_t fl = 0;
        const double g = gain_objective(r, cont, z, zm, &fl);
        EXPECT_TRUE(std::isfinite(g)) << r;
        EXPECT_GE(fl, 1u);
        const double b = bip_objective(r, z, zm, z, zm, draws);
        EXPECT_TRUE(std::isfinite(b)) << r;
    }
}

TEST(Copula, SamplerCorrelationAndMarginals) {
    const std::size_t n = 100000;
    for (double r : {0.0, 0.9, -0.5}) {
        RngStream rng(3, "copula");
        const Eigen::MatrixXd u = GaussianCopula::bivariate(r).sample(n, rng);
        Eigen::VectorXd a(n), b(n);
        std::vector<double> c0(n), c1(n);
        for (std::size_t t = 0; t < n; ++t) {
            a(t) = norm_quantile(u(t, 0));
            b(t) = norm_quantile(u(t, 1));
            c0[t] = u(t, 0);
            c1[t] = u(t, 1);
        }
        EXPECT_NEAR(testing_util::sample_corr(a, b), r, 3.0 / std::sqrt(n)) << r;
        const double crit = 1.63 / std::sqrt(n);
        EXPECT_LE(testing_util::ks_distance(c0, [](double x) { return x; }), crit);
        EXPECT_LE(testing_util::ks_distance(c1, [](double x) { return x; }), crit);
    }
}

TEST(Copula, SamplerGeneralK) {
    Eigen::Matrix3d R;
    R << 1, 0.5, 0.2, 0.5, 1, -0.3, 0.2, -0.3, 1;
    RngStream rng(4, "copula");
    const Eigen::MatrixXd u = GaussianCopula(R).sample(50000, rng);
    Eigen::MatrixXd z(50000, 3);
    for (int t = 0; t < 50000; ++t)
        for (int i = 0; i < 3; ++i) z(t, i) = norm_quantile(u(t, i));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            EXPECT_NEAR(testing_util::sample_corr(z.col(i), z.col(j)), R(i, j), 3.0 / std::sqrt(50000.0));
}

TEST(Copula, GainGridOracle) {
    const ModelSpec spec = testing_util::gain_spec(0.6);
    const SimResult sim = simulate(spec, testing_util::gain_sim(2000, 17));
    const std::vector<PitColumn> pit = pit_columns(spec, sim.frame, sim.lambda);
    const GainObjective obj(pit[0].z, pit[1].z, pit[1].z_minus);
    EXPECT_NEAR(grid_argmin([&](double r) { return obj(r); }), 0.6, 0.1);
    const RFit fit = fit_r([&](double r, std::size_t* fl) { return obj(r, fl); }, pit[0].z.size());
    EXPECT_NEAR(fit.r_hat, 0.6, 0.1);
    EXPECT_EQ(fit.floored, 0u);
}

TEST(Copula, BipGridOracle) {
    const ModelSpec spec = testing_util::bip_spec(-0.45);
    const SimResult sim = simulate(spec, testing_util::bip_sim(2000, 18));
    const std::vector<PitColumn> pit = pit_columns(spec, sim.frame, sim.lambda);
    RngStream rng(5, "draws");
    const std::vector<double> draws = make_draws(2000, DrawScheme::Random, rng);
    const BipObjective obj(pit[0].z, pit[0].z_minus, pit[1].z, pit[1].z_minus, draws);
    EXPECT_NEAR(grid_argmin([&](double r) { return obj(r); }), -0.45, 0.15);
    // The scheme integrating over the other coordinate targets the same r.
    const BipObjective swapped(pit[1].z, pit[1].z_minus, pit[0].z, pit[0].z_minus, draws);
    EXPECT_NEAR(grid_argmin([&](double r) { return swapped(r); }), -0.45, 0.15);
    EXPECT_NEAR(obj(0.0), independence_value({pit[0].z, pit[0].z_minus}), 1e-8);
    EXPECT_NEAR(swapped(0.0), independence_value({pit[1].z, pit[1].z_minus}), 1e-8);
}

TEST(Copula, BipDrawCountConsistency) {
    const ModelSpec spec = testing_util::bip_spec(0.5);
    const SimResult sim = simulate(spec, testing_util::bip_sim(1000, 19));
    const std::vector<PitColumn> pit = pit_columns(spec, sim.frame, sim.lambda);
    RngStream rng_a(6, "draws-a"), rng_b(6, "draws-b");
    const std::vector<double> da = make_draws(10000, DrawScheme::Random, rng_a);
    const std::vector<double> db = make_draws(20000, DrawScheme::Random, rng_b);
    const BipObjective a(pit[0].z, pit[0].z_minus, pit[1].z, pit[1].z_minus, da);
    const BipObjective b(pit[0].z, pit[0].z_minus, pit[1].z, pit[1].z_minus, db);
    // Independent draw sets: the difference has standard error
    // sqrt(se_a^2 + se_b^2).
    for (double r : {-0.6, 0.3, 0.5, 0.8}) {
        const double se_a = a.mc_standard_error(r), se_b = b.mc_standard_error(r);
        EXPECT_NEAR(se_b / se_a, std::sqrt(0.5), 0.15) << r;
        EXPECT_LE(std::abs(a(r) - b(r)), 3.0 * std::hypot(se_a, se_b)) << r;
    }
    // Stratified midpoints approximate the same integral closely.
    RngStream unused(0);
    const BipObjective s(pit[0].z, pit[0].z_minus, pit[1].z, pit[1].z_minus,
                         make_draws(200, DrawScheme::Stratified, unused));
    EXPECT_NEAR(s(0.5), b(0.5), 4.0 * b.mc_standard_error(0.5) + 1e-3);
}

TEST(Copula, IndependentDataGivesSmallR) {
    RngStream rng(8, "indep");
    const Pairs count = random_pairs(2000, rng);
    std::vector<double> cont(2000);
    for (auto& c : cont) c = rng.uniform();
    const GainObjective obj(cont, count.z, count.zm);
    const RFit fit = fit_r([&](double r, std::size_t* fl) { return obj(r, fl); }, 2000);
    EXPECT_LE(std::abs(fit.r_hat), 0.05);
    // The refined value is no worse than any grid point.
    for (int j = -20; j <= 20; ++j) EXPECT_LE(fit.objective, obj(j / 20.0 * (1 - 1e-4)) + 1e-12);
}

TEST(Copula, AllTermsDegenerateFails) {
    const std::vector<double> cont = {0.2, 0.7}, z = {0.5, 0.5}, zm = {0.5, 0.5};
    const GainObjective obj(cont, z, zm);
    EXPECT_THROW(fit_r([&](double r, std::size_t* fl) { return obj(r, fl); }, 2), EstimationError);
}

TEST(Copula, Draws) {
    RngStream rng(9);
    const std::vector<double> s = make_draws(4, DrawScheme::Stratified, rng);
    EXPECT_EQ(s, (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
    for (double u : make_draws(1000, DrawScheme::Random, rng)) {
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Copula, ContinuousPairMatchesDensity) {
    // Bivariate Gaussian copula density at a few points.
    const std::vector<double> u = {0.3, 0.8}, v = {0.6, 0.1};
    const ContinuousPairObjective obj(u, v);
    const double r = 0.4;
    double want = 0.0;
    for (int t = 0; t < 2; ++t) {
        const double a = norm_quantile(u[t]), b = norm_quantile(v[t]);
        want -= -0.5 * std::log(1 - r * r) - (r * r * (a * a + b * b) - 2 * r * a * b) / (2 * (1 - r * r));
    }
    EXPECT_NEAR(obj(r), want, 1e-13);
    EXPECT_NEAR(obj(0.0), 0.0, 1e-15);
}
