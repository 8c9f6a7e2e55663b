#include "mixts/cli.hpp"

#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixts/bootstrap.hpp"
#include "mixts/error.hpp"
#include "mixts/io.hpp"
#include "mixts/mc.hpp"
#include "mixts/parallel.hpp"
#include "mixts/stability.hpp"

namespace mixts {

namespace {

struct SimulateArgs {
    std::string config, out, latent_out;
    int n = 1000;
    std::optional<long long> seed;
    std::optional<int> burn_in;
    bool override_stability = false;
};

struct CheckArgs {
    std::string config;
    double r_moment = 1.0;
};

struct FitArgs {
    std::string config, data, out;
    int bootstrap = 0;
    long long bootstrap_seed = 1;
};

struct McArgs {
    std::string design, out;
    std::optional<int> reps;
    std::optional<long long> seed;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
    Config cfg = read_config(a.config);
    cfg.sim.n = a.n;
    if (a.seed) {
        if (*a.seed < 0) throw InputError("--seed must be >= 0");
        cfg.sim.seed = static_cast<std::uint64_t>(*a.seed);
    }
    if (a.burn_in) cfg.sim.burn_in = *a.burn_in;
    if (a.override_stability) cfg.sim.override_stability = true;
    cfg.sim.validate();
    const SimResult res = simulate(cfg.spec, cfg.sim);
    write_series(res.frame, a.out);
    if (!a.latent_out.empty()) write_text(a.latent_out, emit_latent(res.lambda));
    out << "wrote " << res.frame.n() << " rows to " << a.out << "\n";
    return 0;
}

int do_check(const CheckArgs& a, std::ostream& out) {
    const Config cfg = read_config(a.config);
    out << format_report(check_model(cfg.spec, a.r_moment));
    return 0;
}

int do_fit(const FitArgs& a, int threads, std::ostream& out, std::ostream& err) {
    const Config cfg = read_config(a.config);
    const SeriesFrame data = read_series(a.data, &cfg.spec.families);
    EstimateOptions opts = cfg.estimate;
    opts.threads = threads;
    FitResult result = fit(cfg.spec, data, opts);
    if (!result.all_converged()) err << "warning: optimizer did not converge for every equation\n";
    if (!result.covariance_available) err << "warning: " << result.covariance_message << "\n";
    if (a.bootstrap > 0) {
        if (a.bootstrap_seed < 0) throw InputError("--bootstrap-seed must be >= 0");
        BootstrapOptions bo;
        bo.estimate = cfg.estimate;
        bo.threads = threads;
        bo.burn_in = cfg.sim.burn_in;
        if (cfg.covariate_kind != "none") bo.covariate = cfg.sim.covariate;
        const BootstrapResult boot =
            bootstrap_r(result, data, data.n(), a.bootstrap, static_cast<std::uint64_t>(a.bootstrap_seed), bo);
        attach_bootstrap(result, boot);
    }
    write_text(a.out, emit_fit(result));
    out << "aic = " << format_double(result.aic) << "\n";
    if (result.r_hat) out << "r_hat = " << format_double(*result.r_hat) << "\n";
    if (result.r_boot_se) out << "r_boot_se = " << format_double(*result.r_boot_se) << "\n";
    return 0;
}

int do_mc(const McArgs& a, int threads, std::ostream& out, std::ostream& err) {
    McDesign design = read_design(a.design);
    if (a.reps) design.reps = *a.reps;
    if (a.seed) {
        if (*a.seed < 0) throw InputError("--seed must be >= 0");
        design.seed = static_cast<std::uint64_t>(*a.seed);
    }
    design.validate();
    const McTable table = run_mc(design, threads);
    write_text(a.out, table.to_csv());
    for (const auto& c : table.cells) {
        for (const auto& msg : c.failure_messages) err << "r=" << c.r_true << " n=" << c.n << " " << msg << "\n";
    }
    out << "wrote " << table.cells.size() << " cells to " << a.out << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulate and fit mixed-type multivariate time series"};
    app.require_subcommand(1);
    int threads = default_threads();
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Simulate a path from a config");
    cmd_sim->add_option("--config", sim.config, "Model config")->required();
    cmd_sim->add_option("--n", sim.n, "Path length")->check(CLI::PositiveNumber);
    cmd_sim->add_option("--seed", sim.seed, "Seed (overrides the config)");
    cmd_sim->add_option("--out", sim.out, "Output CSV")->required();
    cmd_sim->add_option("--latent-out", sim.latent_out, "Latent path CSV");
    cmd_sim->add_option("--burn-in", sim.burn_in, "Burn-in length");
    cmd_sim->add_flag("--override-stability", sim.override_stability, "Simulate even if unstable");

    CheckArgs chk;
    auto* cmd_check = app.add_subcommand("check", "Stability and identifiability diagnostics");
    cmd_check->add_option("--config", chk.config, "Model config")->required();
    cmd_check->add_option("--r-moment", chk.r_moment, "Moment order for the GARCH moment condition");

    FitArgs fa;
    auto* cmd_fit = app.add_subcommand("fit", "Fit a model to a CSV series");
    cmd_fit->add_option("--config", fa.config, "Model config")->required();
    cmd_fit->add_option("--data", fa.data, "Input CSV")->required();
    cmd_fit->add_option("--out", fa.out, "Fit result file")->required();
    cmd_fit->add_option("--bootstrap", fa.bootstrap, "Bootstrap replications for r")->check(CLI::NonNegativeNumber);
    cmd_fit->add_option("--bootstrap-seed", fa.bootstrap_seed, "Bootstrap seed");

    McArgs mc;
    auto* cmd_mc = app.add_subcommand("mc", "Monte-Carlo experiment");
    cmd_mc->add_option("--design", mc.design, "Design file")->required();
    cmd_mc->add_option("--reps", mc.reps, "Replications per cell (overrides the design)");
    cmd_mc->add_option("--seed", mc.seed, "Seed (overrides the design)");
    cmd_mc->add_option("--out", mc.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (cmd_sim->parsed()) return do_simulate(sim, out);
        if (cmd_check->parsed()) return do_check(chk, out);
        if (cmd_fit->parsed()) return do_fit(fa, threads, out, err);
        if (cmd_mc->parsed()) return do_mc(mc, threads, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace mixts
