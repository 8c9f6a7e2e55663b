#include <cmath>

#include <gtest/gtest.h>

#include "mixts/error.hpp"
#include "mixts/mc.hpp"

using namespace mixts;

namespace {

McDesign small_design() {
    McDesign d = read_design(std::string(MIXTS_SOURCE_DIR) + "/configs/gain_mc.design");
    d.r_grid = {0.5};
    d.sizes = {300};
    d.reps = 3;
    d.seed = 77;
    return d;
}

}  // namespace

TEST(Mc, DesignParses) {
    const McDesign d = read_design(std::string(MIXTS_SOURCE_DIR) + "/configs/gain_mc.design");
    EXPECT_EQ(d.r_grid, (std::vector<double>{-0.9, 0.0, 0.9}));
    EXPECT_EQ(d.sizes, (std::vector<int>{1000}));
    EXPECT_EQ(d.reps, 100);
    EXPECT_EQ(d.seed, 2024u);
    EXPECT_NO_THROW(read_design(std::string(MIXTS_SOURCE_DIR) + "/configs/bip_mc.design"));
}

TEST(Mc, ValidateRejects) {
    McDesign d = small_design();
    d.reps = 0;
    EXPECT_THROW(d.validate(), InputError);
    EXPECT_THROW(run_mc(d), InputError);
    d = small_design();
    d.r_grid = {1.0};
    EXPECT_THROW(d.validate(), InputError);
    d = small_design();
    d.sizes = {1};
    EXPECT_THROW(d.validate(), InputError);
}

TEST(Mc, SeedsArePureFunctions) {
    EXPECT_EQ(replication_seed(1, 0, 100, 3), replication_seed(1, 0, 100, 3));
    EXPECT_NE(replication_seed(1, 0, 100, 3), replication_seed(1, 0, 100, 4));
    EXPECT_NE(replication_seed(1, 0, 100, 3), replication_seed(1, 1, 100, 3));
    EXPECT_NE(replication_seed(1, 0, 100, 3), replication_seed(2, 0, 100, 3));
}

TEST(Mc, SingleReplicationIsDeterministic) {
    McDesign d = small_design();
    d.reps = 1;
    const McTable a = run_mc(d);
    const McTable b = run_mc(d, 2);
    ASSERT_EQ(a.cells.size(), 1u);
    EXPECT_EQ(a.cells[0].average, b.cells[0].average);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    EXPECT_EQ(a.cells[0].reps_ok, 1);
}

TEST(Mc, CellSummaries) {
    const McTable t = run_mc(small_design());
    const McCell& c = t.cell(0.5, 300);
    EXPECT_EQ(c.reps_ok + c.failures, 3);
    const int r = t.column("r");
    EXPECT_EQ(c.truth[r], 0.5);
    EXPECT_EQ(c.truth[t.column("B.1.1")], 0.7);
    for (std::size_t q = 0; q < t.names.size(); ++q) {
        // mse = sd^2 (population form) + bias^2 is not assumed; check the
        // basic inequalities instead.
        EXPECT_GE(c.sd[q], 0.0);
        EXPECT_GE(c.mse[q], 0.0);
    }
    EXPECT_THROW(t.column("Z.1"), InputError);
    const std::string csv = t.to_csv();
    EXPECT_EQ(csv.rfind("r_true,n,reps_ok,failures,", 0), 0u);
    EXPECT_NE(csv.find("r.avg"), std::string::npos);
}
