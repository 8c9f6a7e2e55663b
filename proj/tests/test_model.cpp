#include <gtest/gtest.h>

#include "common.hpp"
#include "mixts/error.hpp"
#include "mixts/model.hpp"

using namespace mixts;

TEST(Layout, OrderAndNames) {
    const ParamLayout L(2, 1);
    EXPECT_EQ(L.size(), 2 + 2 + 4 + 2);
    EXPECT_EQ(L.name(0), "d.1");
    EXPECT_EQ(L.name(1), "d.2");
    EXPECT_EQ(L.name(2), "Gamma.1.1");
    EXPECT_EQ(L.name(3), "Gamma.2.1");
    // vec(A) is column-major.
    EXPECT_EQ(L.name(4), "A.1.1");
    EXPECT_EQ(L.name(5), "A.2.1");
    EXPECT_EQ(L.name(6), "A.1.2");
    EXPECT_EQ(L.name(7), "A.2.2");
    EXPECT_EQ(L.name(8), "B.1.1");
    EXPECT_EQ(L.name(9), "B.2.2");
    for (int q = 0; q < L.size(); ++q) EXPECT_EQ(L.index_of(L.name(q)), q);
    EXPECT_THROW(L.index_of("A.3.1"), InputError);
    EXPECT_THROW(L.index_of("B.1.2"), InputError);
}

TEST(Layout, EquationBlock) {
    const ParamLayout L(2, 1);
    EXPECT_EQ(L.equation_size(), 5);
    const std::vector<int> idx = L.equation_indices(1);
    std::vector<std::string> names;
    for (int q : idx) names.push_back(L.name(q));
    EXPECT_EQ(names, (std::vector<std::string>{"d.2", "Gamma.2.1", "A.2.1", "A.2.2", "B.2.2"}));
}

TEST(Layout, PackUnpackRoundTrip) {
    const ModelSpec spec = testing_util::bip_spec();
    const ParamLayout L(2, 1);
    EXPECT_EQ(L.unpack(L.pack(spec.theta)), spec.theta);
    EXPECT_THROW(L.unpack(Eigen::VectorXd::Zero(3)), InputError);
}

TEST(Spec, Validate) {
    ModelSpec spec = testing_util::gain_spec(0.5);
    EXPECT_NO_THROW(spec.validate());
    EXPECT_DOUBLE_EQ(spec.r(), 0.5);
    spec.R(0, 1) = 1.2;
    spec.R(1, 0) = 1.2;
    EXPECT_THROW(spec.validate(), InputError);
    spec = testing_util::gain_spec();
    spec.families.pop_back();
    EXPECT_THROW(spec.validate(), InputError);
    spec = testing_util::gain_spec();
    spec.theta.d(0) = std::nan("");
    EXPECT_THROW(spec.validate(), InputError);
    EXPECT_THROW(spec.set_r(1.0), InputError);
}

TEST(Frame, ValidateNamesRow) {
    const ModelSpec spec = testing_util::bip_spec();
    SeriesFrame f;
    f.y.resize(3, 2);
    f.y << 1, 0, 2, 1, 3, 2;
    f.x = Eigen::MatrixXd::Zero(3, 1);
    try {
        validate_frame(spec, f);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
    f.y(2, 1) = 1;
    EXPECT_NO_THROW(validate_frame(spec, f));
    f.x = Eigen::MatrixXd::Zero(3, 2);
    EXPECT_THROW(validate_frame(spec, f), InputError);
}

TEST(Frame, Transformed) {
    SeriesFrame f;
    f.y.resize(2, 2);
    f.y << -2, 3, 1.5, 0;
    const Eigen::MatrixXd g = transformed({Family::GaussianGarch, Family::PoissonLog}, f.y);
    EXPECT_DOUBLE_EQ(g(0, 0), 4.0);
    EXPECT_DOUBLE_EQ(g(1, 0), 2.25);
    EXPECT_DOUBLE_EQ(g(0, 1), std::log(4.0));
    EXPECT_DOUBLE_EQ(g(1, 1), 0.0);
}
