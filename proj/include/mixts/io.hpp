#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixts/estimate.hpp"
#include "mixts/simulate.hpp"

namespace mixts {

/// Ordered "key = value" pairs. Blank lines and '#' comments are skipped;
/// "key: value" is accepted as well. Duplicate keys are an error.
class KeyValues {
public:
    static KeyValues parse(const std::string& text, const std::string& source = "input");

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::optional<std::string> find(const std::string& key) const;

    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string emit() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Shared configuration for simulate, fit and mc.
struct Config {
    ModelSpec spec;
    SimConfig sim;
    // Covariate process named in the file; kept even when m = 0.
    std::string covariate_kind = "none";
    EstimateOptions estimate;
    // Extra keys with a recognised prefix (e.g. "mc.") left for the caller.
    KeyValues extra;
};

Config parse_config(const std::string& text, const std::vector<std::string>& extra_prefixes = {},
                    const std::string& source = "config");
Config read_config(const std::string& path, const std::vector<std::string>& extra_prefixes = {});
std::string emit_config(const Config& config);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Formats a double with 17 significant digits.
std::string format_double(double value);

/// CSV with header y1..yk[,x1..xm]. When families are given, every response
/// column is checked against its state space; errors name the line.
SeriesFrame parse_series(const std::string& text, const std::vector<Family>* families = nullptr,
                         const std::string& source = "csv");
SeriesFrame read_series(const std::string& path, const std::vector<Family>* families = nullptr);
std::string emit_series(const SeriesFrame& frame);
void write_series(const SeriesFrame& frame, const std::string& path);

/// CSV with header lambda1..lambdak.
std::string emit_latent(const Eigen::MatrixXd& lambda);

/// Structured text form of a fit: "theta.A.2.1 = ...", "se.A.2.1 = ...",
/// "r_hat = ...", "aic = ...".
std::string emit_fit(const FitResult& fit);
/// Restores the fields needed to refit or bootstrap: families, dimensions,
/// theta_hat, standard errors, r_hat, lambda0 and the likelihood summary.
FitResult parse_fit(const std::string& text);

}  // namespace mixts
