#include "mixts/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixts/error.hpp"
#include "mixts/parallel.hpp"
#include "mixts/stability.hpp"

namespace mixts {

BootstrapResult bootstrap_r(const FitResult& fit, const SeriesFrame& data, int n, int B, std::uint64_t seed,
                            const BootstrapOptions& options) {
    if (B < 2) throw InputError("bootstrap: B must be at least 2");
    if (n < 2) throw InputError("bootstrap: n must be at least 2");
    if (!fit.r_hat) throw PreconditionError("bootstrap: the fit has no copula estimate");
    const ModelSpec spec = fit.fitted_spec();
    if (!check_model(spec).pass()) {
        throw PreconditionError("bootstrap: fitted parameter fails the stationarity condition");
    }

    SimConfig sim;
    sim.n = n;
    sim.burn_in = options.burn_in;
    if (options.covariate) {
        sim.covariate = *options.covariate;
    } else if (spec.m > 0) {
        if (data.n() < n) throw InputError("bootstrap: observed covariates are shorter than n");
        sim.covariate = FixedCovariate{data.x.topRows(n)};
    }

    EstimateOptions est = options.estimate;
    est.threads = 1;
    est.compute_sandwich = false;
    est.lambda0.reset();

    std::vector<std::optional<double>> slots(B);
    parallel_for(static_cast<std::size_t>(B), options.threads, [&](std::size_t b) {
        const std::string name = "bootstrap:" + std::to_string(options.identical_seeds ? 1 : b + 1);
        SimConfig local = sim;
        local.seed = RngStream(seed).substream(name).next_u64();
        try {
            const SimResult path = simulate(spec, local);
            const FitResult refit = mixts::fit(spec, path.frame, est);
            if (refit.r_hat && std::abs(*refit.r_hat) < 1.0) slots[b] = *refit.r_hat;
        } catch (const Error&) {
            // dropped
        }
    });

    BootstrapResult out;
    out.seed = seed;
    for (const auto& s : slots) {
        if (s)
            out.r_stars.push_back(*s);
        else
            ++out.dropped;
    }
    if (out.dropped * 5 > B) {
        throw BootstrapError("bootstrap: " + std::to_string(out.dropped) + " of " + std::to_string(B) +
                             " replications failed");
    }
    std::sort(out.r_stars.begin(), out.r_stars.end());
    out.B = static_cast<int>(out.r_stars.size());
    if (out.B < 2) throw BootstrapError("bootstrap: fewer than two successful replications");
    double mean = 0.0;
    for (double r : out.r_stars) mean += r;
    mean /= out.B;
    double ss = 0.0;
    for (double r : out.r_stars) ss += (r - mean) * (r - mean);
    out.se = std::sqrt(ss / (out.B - 1));
    return out;
}

void attach_bootstrap(FitResult& fit, const BootstrapResult& result) {
    fit.r_boot_se = result.se;
    fit.bootstrap_B = result.B;
    fit.bootstrap_dropped = result.dropped;
    fit.bootstrap_seed = result.seed;
}

}  // namespace mixts
