#include "mixts/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mixts/error.hpp"

namespace mixts {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
    const std::string s = trim(text);
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string key(const std::string& prefix, int i) { return prefix + "." + std::to_string(i + 1); }
std::string key(const std::string& prefix, int i, int j) {
    return prefix + "." + std::to_string(i + 1) + "." + std::to_string(j + 1);
}

bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

KeyValues KeyValues::parse(const std::string& text, const std::string& source) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto pos = line.find('=');
        if (pos == std::string::npos) pos = line.find(':');
        if (pos == std::string::npos) {
            throw InputError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string k = trim(line.substr(0, pos));
        const std::string v = trim(line.substr(pos + 1));
        if (k.empty()) throw InputError(source + ":" + std::to_string(lineno) + ": empty key");
        if (kv.has(k)) throw InputError(source + ":" + std::to_string(lineno) + ": duplicate key '" + k + "'");
        kv.entries_.emplace_back(k, v);
    }
    return kv;
}

void KeyValues::set(const std::string& k, const std::string& v) {
    for (auto& e : entries_)
        if (e.first == k) {
            e.second = v;
            return;
        }
    entries_.emplace_back(k, v);
}

bool KeyValues::has(const std::string& k) const { return find(k).has_value(); }

std::optional<std::string> KeyValues::find(const std::string& k) const {
    for (const auto& e : entries_)
        if (e.first == k) return e.second;
    return std::nullopt;
}

const std::string& KeyValues::get(const std::string& k) const {
    for (const auto& e : entries_)
        if (e.first == k) return e.second;
    throw InputError("missing key '" + k + "'");
}

double KeyValues::get_double(const std::string& k) const {
    double v;
    if (!parse_number(get(k), v) || !std::isfinite(v)) {
        throw InputError("key '" + k + "': expected a finite number, got '" + get(k) + "'");
    }
    return v;
}

double KeyValues::get_double(const std::string& k, double fallback) const {
    return has(k) ? get_double(k) : fallback;
}

long long KeyValues::get_int(const std::string& k) const {
    const double v = get_double(k);
    if (v != std::floor(v) || std::abs(v) > 9e15) {
        throw InputError("key '" + k + "': expected an integer, got '" + get(k) + "'");
    }
    return static_cast<long long>(v);
}

long long KeyValues::get_int(const std::string& k, long long fallback) const {
    return has(k) ? get_int(k) : fallback;
}

std::string KeyValues::emit() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

Config parse_config(const std::string& text, const std::vector<std::string>& extra_prefixes,
                    const std::string& source) {
    const KeyValues kv = KeyValues::parse(text, source);
    Config cfg;
    ModelSpec& spec = cfg.spec;
    const long long k = kv.get_int("k");
    const long long m = kv.get_int("m", 0);
    if (k < 1 || k > 64) throw InputError(source + ": k must lie in [1, 64]");
    if (m < 0 || m > 64) throw InputError(source + ": m must lie in [0, 64]");
    spec.k = static_cast<int>(k);
    spec.m = static_cast<int>(m);
    spec.theta = ThetaLinear::zeros(spec.k, spec.m);
    spec.R = Eigen::MatrixXd::Identity(spec.k, spec.k);

    std::vector<std::string> known = {"k", "m", "r", "covariate", "covariate.phi", "covariate.sigma", "burn_in",
                                      "seed", "copula.bip_draws", "copula.scheme", "copula.seed",
                                      "override_stability"};
    for (int i = 0; i < spec.k; ++i) {
        const std::string fk = key("family", i);
        try {
            spec.families.push_back(parse_family(kv.get(fk)));
        } catch (const InputError& e) {
            throw InputError(source + ": " + e.what());
        }
        known.push_back(fk);
        known.push_back(key("d", i));
        known.push_back(key("lambda0", i));
        spec.theta.d(i) = kv.get_double(key("d", i), 0.0);
        for (int j = 0; j < spec.k; ++j) {
            known.push_back(key("A", i, j));
            known.push_back(key("B", i, j));
            known.push_back(key("R", i, j));
            spec.theta.A(i, j) = kv.get_double(key("A", i, j), 0.0);
            spec.theta.B(i, j) = kv.get_double(key("B", i, j), 0.0);
        }
        for (int j = 0; j < spec.m; ++j) {
            known.push_back(key("Gamma", i, j));
            spec.theta.Gamma(i, j) = kv.get_double(key("Gamma", i, j), 0.0);
        }
    }
    if (kv.has("r")) {
        if (spec.k != 2) throw InputError(source + ": key 'r' needs k = 2; use R.i.j");
        spec.set_r(kv.get_double("r"));
    }
    for (int i = 0; i < spec.k; ++i)
        for (int j = 0; j < spec.k; ++j)
            if (kv.has(key("R", i, j))) {
                if (kv.has("r")) throw InputError(source + ": give either 'r' or R.i.j, not both");
                spec.R(i, j) = kv.get_double(key("R", i, j));
            }

    const ParamLayout layout(spec.k, spec.m);
    for (const auto& [k2, v] : kv.entries()) {
        if (starts_with(k2, "fixed.")) {
            const std::string name = k2.substr(6);
            layout.index_of(name);
            cfg.estimate.fixed[name] = kv.get_double(k2);
            continue;
        }
        bool ok = std::find(known.begin(), known.end(), k2) != known.end();
        for (const auto& p : extra_prefixes)
            if (starts_with(k2, p)) {
                cfg.extra.set(k2, v);
                ok = true;
            }
        if (!ok) throw InputError(source + ": unknown key '" + k2 + "'");
    }

    bool any_lambda0 = false;
    Eigen::VectorXd lambda0(spec.k);
    for (int i = 0; i < spec.k; ++i) {
        if (kv.has(key("lambda0", i))) {
            any_lambda0 = true;
            lambda0(i) = kv.get_double(key("lambda0", i));
        }
    }
    if (any_lambda0) {
        for (int i = 0; i < spec.k; ++i)
            if (!kv.has(key("lambda0", i))) throw InputError(source + ": lambda0 must be given for every coordinate");
        cfg.estimate.lambda0 = lambda0;
    }

    cfg.covariate_kind = kv.find("covariate").value_or("none");
    if (cfg.covariate_kind == "ar1") {
        if (spec.m != 1) throw InputError(source + ": the ar1 covariate generator needs m = 1");
        cfg.sim.covariate = Ar1Covariate{kv.get_double("covariate.phi", 0.0), kv.get_double("covariate.sigma", 1.0)};
    } else if (cfg.covariate_kind != "none") {
        throw InputError(source + ": covariate must be 'none' or 'ar1'");
    }
    const long long burn = kv.get_int("burn_in", 500);
    if (burn < 0) throw InputError(source + ": burn_in must be >= 0");
    cfg.sim.burn_in = static_cast<int>(burn);
    const long long seed = kv.get_int("seed", 1);
    if (seed < 0) throw InputError(source + ": seed must be >= 0");
    cfg.sim.seed = static_cast<std::uint64_t>(seed);
    if (kv.has("override_stability")) {
        const std::string& v = kv.get("override_stability");
        if (v != "true" && v != "false") throw InputError(source + ": override_stability must be true or false");
        cfg.sim.override_stability = v == "true";
    }

    const long long draws = kv.get_int("copula.bip_draws", 10000);
    if (draws < 1) throw InputError(source + ": copula.bip_draws must be >= 1");
    cfg.estimate.bip_draws = static_cast<std::size_t>(draws);
    const std::string scheme = kv.find("copula.scheme").value_or("random");
    if (scheme == "random")
        cfg.estimate.draw_scheme = DrawScheme::Random;
    else if (scheme == "stratified")
        cfg.estimate.draw_scheme = DrawScheme::Stratified;
    else
        throw InputError(source + ": copula.scheme must be 'random' or 'stratified'");
    const long long cseed = kv.get_int("copula.seed", 7);
    if (cseed < 0) throw InputError(source + ": copula.seed must be >= 0");
    cfg.estimate.draw_seed = static_cast<std::uint64_t>(cseed);

    try {
        spec.validate();
        cfg.sim.validate();
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
    return cfg;
}

Config read_config(const std::string& path, const std::vector<std::string>& extra_prefixes) {
    return parse_config(read_text(path), extra_prefixes, path);
}

std::string emit_config(const Config& cfg) {
    const ModelSpec& spec = cfg.spec;
    KeyValues kv;
    kv.set("k", std::to_string(spec.k));
    kv.set("m", std::to_string(spec.m));
    for (int i = 0; i < spec.k; ++i) kv.set(key("family", i), std::string(family_name(spec.families[i])));
    for (int i = 0; i < spec.k; ++i) {
        kv.set(key("d", i), format_double(spec.theta.d(i)));
        for (int j = 0; j < spec.k; ++j) kv.set(key("A", i, j), format_double(spec.theta.A(i, j)));
        for (int j = 0; j < spec.k; ++j) kv.set(key("B", i, j), format_double(spec.theta.B(i, j)));
        for (int j = 0; j < spec.m; ++j) kv.set(key("Gamma", i, j), format_double(spec.theta.Gamma(i, j)));
    }
    if (spec.k == 2) {
        kv.set("r", format_double(spec.R(0, 1)));
    } else {
        for (int i = 0; i < spec.k; ++i)
            for (int j = 0; j < spec.k; ++j) kv.set(key("R", i, j), format_double(spec.R(i, j)));
    }
    kv.set("covariate", cfg.covariate_kind);
    if (const auto* ar = std::get_if<Ar1Covariate>(&cfg.sim.covariate)) {
        kv.set("covariate.phi", format_double(ar->phi));
        kv.set("covariate.sigma", format_double(ar->sigma));
    }
    kv.set("burn_in", std::to_string(cfg.sim.burn_in));
    kv.set("seed", std::to_string(cfg.sim.seed));
    if (cfg.sim.override_stability) kv.set("override_stability", "true");
    if (cfg.estimate.lambda0)
        for (int i = 0; i < spec.k; ++i) kv.set(key("lambda0", i), format_double((*cfg.estimate.lambda0)(i)));
    for (const auto& [name, value] : cfg.estimate.fixed) kv.set("fixed." + name, format_double(value));
    kv.set("copula.bip_draws", std::to_string(cfg.estimate.bip_draws));
    kv.set("copula.scheme", cfg.estimate.draw_scheme == DrawScheme::Random ? "random" : "stratified");
    kv.set("copula.seed", std::to_string(cfg.estimate.draw_seed));
    for (const auto& [k2, v] : cfg.extra.entries()) kv.set(k2, v);
    return kv.emit();
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write failed for '" + path + "'");
}

SeriesFrame parse_series(const std::string& text, const std::vector<Family>* families, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> InputError {
        return InputError(source + ":" + std::to_string(lineno) + ": " + msg);
    };

    if (!std::getline(in, line)) throw InputError(source + ": empty file");
    ++lineno;
    const std::vector<std::string> header = split(trim(line), ',');
    int k = 0, m = 0;
    for (const auto& h : header) {
        if (h == "y" + std::to_string(k + 1) && m == 0) {
            ++k;
        } else if (h == "x" + std::to_string(m + 1) && k > 0) {
            ++m;
        } else {
            throw fail("header must be y1..yk followed by x1..xm, got '" + h + "'");
        }
    }
    if (k == 0) throw fail("header has no response columns");
    if (families && static_cast<int>(families->size()) != k) {
        throw fail("header has " + std::to_string(k) + " response columns, model has " +
                   std::to_string(families->size()));
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (static_cast<int>(cells.size()) != k + m) {
            throw fail("expected " + std::to_string(k + m) + " fields, got " + std::to_string(cells.size()));
        }
        std::vector<double> row(k + m);
        for (int c = 0; c < k + m; ++c) {
            double v;
            if (!parse_number(cells[c], v)) throw fail("column " + header[c] + ": not a number '" + cells[c] + "'");
            if (!std::isfinite(v)) throw fail("column " + header[c] + ": non-finite value");
            if (c < k && families && !in_state_space((*families)[c], v)) {
                throw fail("column " + header[c] + ": value " + cells[c] + " outside the state space of " +
                           std::string(family_name((*families)[c])));
            }
            row[c] = v;
        }
        rows.push_back(std::move(row));
    }

    SeriesFrame frame;
    frame.y.resize(static_cast<Eigen::Index>(rows.size()), k);
    frame.x.resize(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (int c = 0; c < k; ++c) frame.y(t, c) = rows[t][c];
        for (int c = 0; c < m; ++c) frame.x(t, c) = rows[t][k + c];
    }
    return frame;
}

SeriesFrame read_series(const std::string& path, const std::vector<Family>* families) {
    return parse_series(read_text(path), families, path);
}

std::string emit_series(const SeriesFrame& frame) {
    std::string out;
    for (int c = 0; c < frame.k(); ++c) out += (c ? ",y" : "y") + std::to_string(c + 1);
    for (int c = 0; c < frame.m(); ++c) out += ",x" + std::to_string(c + 1);
    out += "\n";
    for (int t = 0; t < frame.n(); ++t) {
        for (int c = 0; c < frame.k(); ++c) {
            if (c) out += ",";
            out += format_double(frame.y(t, c));
        }
        for (int c = 0; c < frame.m(); ++c) out += "," + format_double(frame.x(t, c));
        out += "\n";
    }
    return out;
}

void write_series(const SeriesFrame& frame, const std::string& path) { write_text(path, emit_series(frame)); }

std::string emit_latent(const Eigen::MatrixXd& lambda) {
    std::string out;
    for (Eigen::Index c = 0; c < lambda.cols(); ++c) out += (c ? ",lambda" : "lambda") + std::to_string(c + 1);
    out += "\n";
    for (Eigen::Index t = 0; t < lambda.rows(); ++t) {
        for (Eigen::Index c = 0; c < lambda.cols(); ++c) {
            if (c) out += ",";
            out += format_double(lambda(t, c));
        }
        out += "\n";
    }
    return out;
}

std::string emit_fit(const FitResult& fit) {
    KeyValues kv;
    const ParamLayout layout(fit.k, fit.m);
    kv.set("k", std::to_string(fit.k));
    kv.set("m", std::to_string(fit.m));
    for (int i = 0; i < fit.k; ++i) kv.set(key("family", i), std::string(family_name(fit.families[i])));
    kv.set("n", std::to_string(fit.n));
    kv.set("n_eff", std::to_string(fit.n_eff));
    const Eigen::VectorXd theta = layout.pack(fit.theta_hat);
    for (int q = 0; q < layout.size(); ++q) kv.set("theta." + layout.name(q), format_double(theta(q)));
    for (int q = 0; q < layout.size(); ++q) {
        const bool has_se = fit.covariance_available && fit.free_mask[q];
        kv.set("se." + layout.name(q), has_se ? format_double(fit.std_errors(q)) : "nan");
    }
    for (int q = 0; q < layout.size(); ++q) {
        if (!fit.free_mask[q]) kv.set("fixed." + layout.name(q), format_double(theta(q)));
    }
    kv.set("covariance", fit.covariance_available ? "available" : "unavailable");
    if (!fit.covariance_available) kv.set("covariance.message", fit.covariance_message);
    for (int i = 0; i < fit.k; ++i) {
        const EquationFit& e = fit.equations[i];
        kv.set(key("objective", i), format_double(e.objective));
        kv.set(key("status", i), e.converged ? "converged" : "not_converged");
        kv.set(key("iterations", i), std::to_string(e.iterations));
        kv.set(key("start", i), std::to_string(e.start + 1));
        kv.set(key("lambda0", i), format_double(fit.lambda0(i)));
    }
    if (fit.r_hat) {
        kv.set("r_hat", format_double(*fit.r_hat));
        kv.set("copula.kind", fit.copula.kind);
        kv.set("copula.objective", format_double(fit.copula.objective));
        kv.set("copula.floored", std::to_string(fit.copula.floored));
        kv.set("copula.mc_se", format_double(fit.copula.mc_se));
    }
    kv.set("loglik", format_double(fit.loglik));
    kv.set("n_params", std::to_string(fit.n_params));
    kv.set("aic", format_double(fit.aic));
    if (fit.covariance_available) {
        for (int a = 0; a < layout.size(); ++a)
            for (int b = a; b < layout.size(); ++b)
                if (fit.free_mask[a] && fit.free_mask[b])
                    kv.set("cov." + layout.name(a) + "." + layout.name(b), format_double(fit.cov_theta(a, b)));
    }
    if (fit.r_boot_se) {
        kv.set("r_boot_se", format_double(*fit.r_boot_se));
        kv.set("bootstrap.B", std::to_string(fit.bootstrap_B));
        kv.set("bootstrap.dropped", std::to_string(fit.bootstrap_dropped));
        kv.set("bootstrap.seed", std::to_string(fit.bootstrap_seed));
    }
    return kv.emit();
}

FitResult parse_fit(const std::string& text) {
    const KeyValues kv = KeyValues::parse(text, "fit");
    FitResult fit;
    fit.k = static_cast<int>(kv.get_int("k"));
    fit.m = static_cast<int>(kv.get_int("m"));
    if (fit.k < 1 || fit.m < 0) throw InputError("fit: invalid dimensions");
    for (int i = 0; i < fit.k; ++i) fit.families.push_back(parse_family(kv.get(key("family", i))));
    fit.n = static_cast<int>(kv.get_int("n"));
    fit.n_eff = static_cast<int>(kv.get_int("n_eff"));
    const ParamLayout layout(fit.k, fit.m);
    Eigen::VectorXd theta(layout.size());
    fit.std_errors = Eigen::VectorXd::Zero(layout.size());
    fit.free_mask.assign(layout.size(), true);
    for (int q = 0; q < layout.size(); ++q) {
        theta(q) = kv.get_double("theta." + layout.name(q));
        if (kv.has("fixed." + layout.name(q))) fit.free_mask[q] = false;
        double se;
        if (parse_number(kv.find("se." + layout.name(q)).value_or("nan"), se) && std::isfinite(se))
            fit.std_errors(q) = se;
    }
    fit.theta_hat = layout.unpack(theta);
    fit.covariance_available = kv.find("covariance").value_or("") == "available";
    fit.covariance_message = kv.find("covariance.message").value_or(fit.covariance_available ? "ok" : "");
    if (fit.covariance_available) {
        fit.cov_theta = Eigen::MatrixXd::Zero(layout.size(), layout.size());
        for (int a = 0; a < layout.size(); ++a)
            for (int b = a; b < layout.size(); ++b) {
                if (!(fit.free_mask[a] && fit.free_mask[b])) continue;
                fit.cov_theta(a, b) = fit.cov_theta(b, a) =
                    kv.get_double("cov." + layout.name(a) + "." + layout.name(b));
            }
    }
    fit.lambda0.resize(fit.k);
    fit.per_equation_objective.resize(fit.k);
    fit.equations.resize(fit.k);
    for (int i = 0; i < fit.k; ++i) {
        fit.lambda0(i) = kv.get_double(key("lambda0", i));
        fit.per_equation_objective(i) = kv.get_double(key("objective", i));
        fit.equations[i].objective = fit.per_equation_objective(i);
        fit.equations[i].converged = kv.get(key("status", i)) == "converged";
        fit.equations[i].iterations = static_cast<int>(kv.get_int(key("iterations", i), 0));
        fit.equations[i].start = static_cast<int>(kv.get_int(key("start", i), 0)) - 1;
        fit.equations[i].theta_i = theta(layout.equation_indices(i)).eval();
    }
    if (kv.has("r_hat")) {
        fit.r_hat = kv.get_double("r_hat");
        fit.copula.r_hat = *fit.r_hat;
        fit.copula.kind = kv.find("copula.kind").value_or("");
        fit.copula.objective = kv.get_double("copula.objective", 0.0);
        fit.copula.floored = static_cast<std::size_t>(kv.get_int("copula.floored", 0));
        fit.copula.mc_se = kv.get_double("copula.mc_se", 0.0);
    }
    fit.loglik = kv.get_double("loglik");
    fit.aic = kv.get_double("aic");
    fit.n_params = static_cast<int>(kv.get_int("n_params"));
    if (kv.has("r_boot_se")) {
        fit.r_boot_se = kv.get_double("r_boot_se");
        fit.bootstrap_B = static_cast<int>(kv.get_int("bootstrap.B"));
        fit.bootstrap_dropped = static_cast<int>(kv.get_int("bootstrap.dropped", 0));
        const std::string seed = kv.find("bootstrap.seed").value_or("0");
        try {
            fit.bootstrap_seed = std::stoull(seed);
        } catch (const std::exception&) {
            throw InputError("fit: invalid bootstrap.seed '" + seed + "'");
        }
    }
    return fit;
}

}  // namespace mixts
