#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixts/io.hpp"

namespace mixts {

struct McDesign {
    Config base;  // true parameters, covariate process, fit options
    std::vector<double> r_grid;
    std::vector<int> sizes;
    int reps = 100;
    std::uint64_t seed = 1;

    /// Throws InputError on an empty grid, |r| >= 1, n < 2 or reps < 1.
    void validate() const;
};

/// Config text plus "mc.r_grid", "mc.sizes" (comma separated), "mc.reps" and
/// "mc.seed".
McDesign parse_design(const std::string& text, const std::string& source = "design");
McDesign read_design(const std::string& path);

struct McCell {
    double r_true = 0.0;
    int n = 0;
    int reps_ok = 0;
    int failures = 0;
    // One entry per parameter name (stacked layout order, then "r").
    std::vector<double> truth, average, sd, mse;
    std::vector<std::string> failure_messages;
};

struct McTable {
    std::vector<std::string> names;
    std::vector<McCell> cells;

    const McCell& cell(double r, int n) const;
    /// Column index of a parameter name such as "B.1.1" or "r".
    int column(const std::string& name) const;
    std::string to_csv() const;
};

/// Seed of replication `rep` in cell (r index, n): a pure function of the
/// design seed, so cells and replications can run in any order.
std::uint64_t replication_seed(std::uint64_t design_seed, std::size_t r_index, int n, int rep);

/// simulate -> fit for every (r, n, replication). Replications that throw
/// or do not converge are counted as failures and left out of the averages.
McTable run_mc(const McDesign& design, int threads = 1);

}  // namespace mixts
