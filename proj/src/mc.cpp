#include "mixts/mc.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "mixts/error.hpp"
#include "mixts/parallel.hpp"

namespace mixts {

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        while (end && (*end == ' ' || *end == '\t')) ++end;
        if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
            throw InputError("key '" + key + "': bad list entry '" + cell + "'");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace

void McDesign::validate() const {
    if (r_grid.empty()) throw InputError("mc: empty r grid");
    for (double r : r_grid)
        if (!(std::abs(r) < 1.0)) throw InputError("mc: every r must lie in (-1, 1)");
    if (sizes.empty()) throw InputError("mc: no sample sizes");
    for (int n : sizes)
        if (n < 2) throw InputError("mc: sample sizes must be >= 2");
    if (reps < 1) throw InputError("mc: reps must be >= 1");
    if (base.spec.k != 2) throw InputError("mc: designs need k = 2");
}

McDesign parse_design(const std::string& text, const std::string& source) {
    McDesign d;
    d.base = parse_config(text, {"mc."}, source);
    const KeyValues& kv = d.base.extra;
    for (const auto& [k, v] : kv.entries()) {
        if (k != "mc.r_grid" && k != "mc.sizes" && k != "mc.reps" && k != "mc.seed") {
            throw InputError(source + ": unknown key '" + k + "'");
        }
    }
    d.r_grid = kv.has("mc.r_grid") ? parse_list(kv.get("mc.r_grid"), "mc.r_grid")
                                   : std::vector<double>{d.base.spec.r()};
    if (kv.has("mc.sizes")) {
        for (double v : parse_list(kv.get("mc.sizes"), "mc.sizes")) {
            if (v != std::floor(v)) throw InputError(source + ": sample sizes must be integers");
            d.sizes.push_back(static_cast<int>(v));
        }
    } else {
        d.sizes = {1000};
    }
    d.reps = static_cast<int>(kv.get_int("mc.reps", 100));
    const long long seed = kv.get_int("mc.seed", static_cast<long long>(d.base.sim.seed));
    if (seed < 0) throw InputError(source + ": mc.seed must be >= 0");
    d.seed = static_cast<std::uint64_t>(seed);
    d.validate();
    return d;
}

McDesign read_design(const std::string& path) { return parse_design(read_text(path), path); }

const McCell& McTable::cell(double r, int n) const {
    for (const auto& c : cells)
        if (std::abs(c.r_true - r) < 1e-12 && c.n == n) return c;
    throw InputError("mc: no cell for the requested (r, n)");
}

int McTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<int>(j);
    throw InputError("mc: unknown parameter '" + name + "'");
}

std::string McTable::to_csv() const {
    std::string out = "r_true,n,reps_ok,failures";
    for (const auto& nm : names) out += "," + nm + ".true," + nm + ".avg," + nm + ".sd," + nm + ".mse";
    out += "\n";
    for (const auto& c : cells) {
        out += format_double(c.r_true) + "," + std::to_string(c.n) + "," + std::to_string(c.reps_ok) + "," +
               std::to_string(c.failures);
        for (std::size_t j = 0; j < names.size(); ++j) {
            out += "," + format_double(c.truth[j]) + "," + format_double(c.average[j]) + "," + format_double(c.sd[j]) +
                   "," + format_double(c.mse[j]);
        }
        out += "\n";
    }
    return out;
}

std::uint64_t replication_seed(std::uint64_t design_seed, std::size_t r_index, int n, int rep) {
    const std::string name = "mc:" + std::to_string(r_index) + ":" + std::to_string(n) + ":" + std::to_string(rep);
    return RngStream(design_seed).substream(name).next_u64();
}

McTable run_mc(const McDesign& design, int threads) {
    design.validate();
    const ParamLayout layout(design.base.spec.k, design.base.spec.m);
    const int q_size = layout.size();
    McTable table;
    for (int q = 0; q < q_size; ++q) table.names.push_back(layout.name(q));
    table.names.push_back("r");

    EstimateOptions est = design.base.estimate;
    est.threads = 1;
    est.compute_sandwich = false;

    for (std::size_t ri = 0; ri < design.r_grid.size(); ++ri) {
        ModelSpec spec = design.base.spec;
        spec.set_r(design.r_grid[ri]);
        Eigen::VectorXd truth(q_size + 1);
        truth.head(q_size) = layout.pack(spec.theta);
        truth(q_size) = design.r_grid[ri];

        for (int n : design.sizes) {
            std::vector<std::optional<Eigen::VectorXd>> results(design.reps);
            std::vector<std::string> messages(design.reps);
            parallel_for(static_cast<std::size_t>(design.reps), threads, [&](std::size_t rep) {
                SimConfig sim = design.base.sim;
                sim.n = n;
                sim.seed = replication_seed(design.seed, ri, n, static_cast<int>(rep));
                try {
                    const SimResult path = simulate(spec, sim);
                    const FitResult f = fit(spec, path.frame, est);
                    if (!f.all_converged()) {
                        messages[rep] = "not converged";
                        return;
                    }
                    Eigen::VectorXd row(q_size + 1);
                    row.head(q_size) = layout.pack(f.theta_hat);
                    row(q_size) = f.r_hat.value_or(std::nan(""));
                    results[rep] = row;
                } catch (const Error& e) {
                    messages[rep] = e.what();
                }
            });

            McCell cell;
            cell.r_true = design.r_grid[ri];
            cell.n = n;
            const int cols = q_size + 1;
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(cols);
            for (int rep = 0; rep < design.reps; ++rep) {
                if (results[rep]) {
                    sum += *results[rep];
                    ++cell.reps_ok;
                } else {
                    ++cell.failures;
                    cell.failure_messages.push_back("rep " + std::to_string(rep) + ": " + messages[rep]);
                }
            }
            Eigen::VectorXd avg = sum / std::max(1, cell.reps_ok);
            Eigen::VectorXd ss = Eigen::VectorXd::Zero(cols), se2 = Eigen::VectorXd::Zero(cols);
            for (int rep = 0; rep < design.reps; ++rep) {
                if (!results[rep]) continue;
                ss += (*results[rep] - avg).cwiseAbs2();
                se2 += (*results[rep] - truth).cwiseAbs2();
            }
            const double nan = std::nan("");
            for (int j = 0; j < cols; ++j) {
                cell.truth.push_back(truth(j));
                cell.average.push_back(cell.reps_ok ? avg(j) : nan);
                cell.sd.push_back(cell.reps_ok > 1 ? std::sqrt(ss(j) / (cell.reps_ok - 1)) : nan);
                cell.mse.push_back(cell.reps_ok ? se2(j) / cell.reps_ok : nan);
            }
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

}  // namespace mixts
