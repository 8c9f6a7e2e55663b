#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "common.hpp"
#include "mixts/error.hpp"
#include "mixts/rng.hpp"
#include "mixts/stability.hpp"

using namespace mixts;

namespace {

// Largest root modulus of t^2 - tr t + det.
double rho2(const Eigen::Matrix2d& M) {
    const std::complex<double> tr = M.trace(), det = M.determinant();
    const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
    return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

}  // namespace

TEST(Spectral, Examples) {
    EXPECT_DOUBLE_EQ(spectral_radius(Eigen::Matrix2d::Identity()), 1.0);
    EXPECT_DOUBLE_EQ(spectral_radius(Eigen::Vector2d(0.7, 0.5).asDiagonal().toDenseMatrix()), 0.7);
    Eigen::Matrix2d M;
    M << 0.75, 0.05, 0.3, 0.6;
    EXPECT_NEAR(spectral_radius(M), 0.81861, 1e-5);
    EXPECT_NEAR(spectral_radius(M), (1.35 + std::sqrt(1.35 * 1.35 - 4 * 0.435)) / 2, 1e-14);
    EXPECT_THROW(spectral_radius(Eigen::MatrixXd::Zero(2, 3)), InputError);
}

TEST(Spectral, RandomAgainstClosedForm) {
    RngStream rng(3, "spectral");
    for (int it = 0; it < 1000; ++it) {
        Eigen::Matrix2d M;
        for (int j = 0; j < 4; ++j) M(j / 2, j % 2) = 4.0 * rng.uniform() - 2.0;
        EXPECT_NEAR(spectral_radius(M), rho2(M), 1e-8 * std::max(1.0, rho2(M)));
    }
}

TEST(Spectral, TransposeAndScaling) {
    RngStream rng(4, "spectral");
    for (int k : {2, 3, 5}) {
        for (int it = 0; it < 50; ++it) {
            Eigen::MatrixXd M(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) M(i, j) = rng.uniform() - 0.5;
            const double rho = spectral_radius(M);
            EXPECT_NEAR(spectral_radius(M.transpose()), rho, 1e-10);
            EXPECT_NEAR(spectral_radius(-2.5 * M), 2.5 * rho, 1e-10);
        }
    }
}

TEST(Spectral, GelfandBracket) {
    RngStream rng(6, "gelfand");
    for (int k : {2, 3, 4}) {
        for (int it = 0; it < 20; ++it) {
            Eigen::MatrixXd M(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) M(i, j) = rng.uniform();
            const double rho = spectral_radius(M);
            const auto [lo, hi] = gelfand_bracket(M, 2048);
            EXPECT_LE(lo, rho + 1e-6);
            EXPECT_GE(hi, rho - 1e-6);
            EXPECT_LE(hi - lo, 1e-2);
        }
    }
}

TEST(Stability, GainExamples) {
    const ModelSpec spec = testing_util::gain_spec();
    const StabilityReport rep = check_gain(spec.theta, 1.0);
    EXPECT_NEAR(rep.rho_stationarity, 0.81861, 1e-5);
    EXPECT_TRUE(rep.pass());
    ThetaLinear t = ThetaLinear::zeros(2, 0);
    t.B.diagonal() << 0.999, 0.999;
    EXPECT_NEAR(check_gain(t, 1.0).rho_stationarity, 0.999, 1e-15);
    EXPECT_TRUE(check_gain(t, 1.0).pass());
    t.A.diagonal() << 0.6, 0.6;
    t.B.diagonal() << 0.6, 0.6;
    EXPECT_NEAR(check_gain(t, 1.0).rho_stationarity, 1.2, 1e-15);
    EXPECT_FALSE(check_gain(t, 1.0).pass());
    t.A(0, 1) = -0.1;
    EXPECT_THROW(check_gain(t, 1.0), PreconditionError);
}

TEST(Stability, MomentCondition) {
    EXPECT_NEAR(normal_even_moment_root(1.0), 1.0, 1e-14);
    EXPECT_NEAR(normal_even_moment_root(2.0), std::sqrt(3.0), 1e-13);
    EXPECT_NEAR(normal_even_moment_root(3.0), std::cbrt(15.0), 1e-13);
    const ModelSpec spec = testing_util::gain_spec();
    const StabilityReport rep = check_gain(spec.theta, 2.0);
    Eigen::Matrix2d M = spec.theta.B;
    M.col(0) += spec.theta.A.col(0) * std::sqrt(3.0);
    M.col(1) += spec.theta.A.col(1);
    ASSERT_TRUE(rep.rho_moment);
    EXPECT_NEAR(*rep.rho_moment, rho2(M), 1e-12);
}

TEST(Stability, BipExamples) {
    // Binary-first order, as in the logistic/Poisson formulation.
    ThetaLinear t = ThetaLinear::zeros(2, 1);
    t.A << 0.3, 0.3, 0.4, -0.6;
    t.B.diagonal() << 0.15, 0.2;
    const StabilityReport rep = check_bip(t);
    EXPECT_NEAR(rep.rho_stationarity, 0.84815, 1e-5);
    ASSERT_TRUE(rep.infnorm_condition);
    EXPECT_NEAR(*rep.infnorm_condition, 0.8, 1e-15);
    EXPECT_TRUE(rep.pass());

    const StabilityReport zero = check_bip(ThetaLinear::zeros(2, 0));
    EXPECT_EQ(zero.rho_stationarity, 0.0);
    EXPECT_EQ(*zero.infnorm_condition, 0.0);

    ThetaLinear b = ThetaLinear::zeros(2, 0);
    b.A(0, 0) = 4.0;
    const StabilityReport edge = check_bip(b);
    EXPECT_DOUBLE_EQ(edge.rho_stationarity, 1.0);
    EXPECT_FALSE(edge.pass());
}

TEST(Stability, BipCoordinateOrdering) {
    // Count-first ordering: c = (1, 1/4) and the binary column is the second.
    const ModelSpec spec = testing_util::bip_spec();
    const StabilityReport rep = check_model(spec);
    Eigen::Matrix2d M = spec.theta.B.cwiseAbs();
    M.col(0) += spec.theta.A.col(0).cwiseAbs();
    M.col(1) += 0.25 * spec.theta.A.col(1).cwiseAbs();
    EXPECT_NEAR(rep.rho_stationarity, rho2(M), 1e-12);
    EXPECT_NEAR(*rep.infnorm_condition, 0.6, 1e-15);
}

TEST(Identifiability, Examples) {
    ThetaLinear t = ThetaLinear::zeros(2, 0);
    t.A(0, 0) = 1.0;
    Identifiability id = check_identifiability(t);
    EXPECT_FALSE(id.i3);
    EXPECT_FALSE(id.i4);
    t.A = Eigen::Matrix2d::Identity();
    t.B.diagonal() << 0.5, 0.2;
    id = check_identifiability(t);
    EXPECT_TRUE(id.i3);
    EXPECT_TRUE(id.i4);
    id = check_identifiability(testing_util::bip_spec().theta);
    EXPECT_TRUE(id.i3);
    EXPECT_TRUE(id.i4);
    // Rank one: both rows proportional and B a multiple of the identity.
    t.A << 1, 2, 2, 4;
    t.B.diagonal() << 0.3, 0.3;
    id = check_identifiability(t);
    EXPECT_TRUE(id.i3);
    EXPECT_FALSE(id.i4);
    t.B(0, 1) = 0.1;
    EXPECT_THROW(check_identifiability(t), UnsupportedCheckError);
}

TEST(Identifiability, Rank) {
    Eigen::MatrixXd M(2, 6);
    M << 1, 2, 3, 4, 5, 6, 2, 4, 6, 8, 10, 12;
    EXPECT_EQ(matrix_rank(M), 1);
    M(1, 5) += 1e-3;
    EXPECT_EQ(matrix_rank(M), 2);
    EXPECT_EQ(matrix_rank(Eigen::MatrixXd::Zero(3, 3)), 0);
}

TEST(Report, Format) {
    const std::string text = format_report(check_model(testing_util::gain_spec()));
    EXPECT_NE(text.find("rho_stationarity: 0.8186"), std::string::npos) << text;
    EXPECT_NE(text.find("rho_moment: "), std::string::npos);
    EXPECT_NE(text.find("I3: true"), std::string::npos);
    EXPECT_NE(text.find("I4: true"), std::string::npos);
    EXPECT_NE(text.find("I1: user-asserted"), std::string::npos);
    const std::string bip = format_report(check_model(testing_util::bip_spec()));
    EXPECT_NE(bip.find("infnorm_condition: "), std::string::npos);
}
