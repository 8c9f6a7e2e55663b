#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mixts/estimate.hpp"
#include "mixts/simulate.hpp"

namespace mixts {

struct BootstrapResult {
    int B = 0;                    // replications kept
    std::vector<double> r_stars;  // sorted ascending
    double se = 0.0;
    std::uint64_t seed = 0;
    int dropped = 0;
};

struct BootstrapOptions {
    EstimateOptions estimate;
    // Covariate process used for the replicated paths. Empty means: reuse the
    // observed covariates when m > 0.
    std::optional<CovariateProcess> covariate;
    int burn_in = 500;
    int threads = 1;
    // Every replication draws from the same sub-stream; only for testing the
    // degenerate case.
    bool identical_seeds = false;
};

/// Parametric bootstrap of r_hat: B paths of length n under (theta_hat,
/// r_hat), each refitted. Replication b uses sub-stream "bootstrap:b" of
/// `seed`. Failed replications are dropped; more than 20% drops throws
/// BootstrapError.
BootstrapResult bootstrap_r(const FitResult& fit, const SeriesFrame& data, int n, int B, std::uint64_t seed,
                            const BootstrapOptions& options = {});

/// Records the bootstrap outcome in the fit (r_boot_se and bookkeeping).
void attach_bootstrap(FitResult& fit, const BootstrapResult& result);

}  // namespace mixts
