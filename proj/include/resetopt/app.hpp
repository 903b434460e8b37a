#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "resetopt/analytics.hpp"
#include "resetopt/io.hpp"
#include "resetopt/ladder.hpp"
#include "resetopt/lattice.hpp"
#include "resetopt/model.hpp"
#include "resetopt/monte_carlo.hpp"
#include "resetopt/parity.hpp"

namespace resetopt {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;  // boundary | price | parity | verify-lattice | verify-mc | figure
    ModelParams params;   // defaults: r=0.03, delta=0.04, sigma=0.4, T=1, K=1
    std::size_t rights = 4;
    std::size_t grid_steps = 400;
    double x_min = 0.5;
    double x_max = 2.0;
    std::size_t x_steps = 16;
    std::string output_format = "csv";  // csv | json
    std::string out_file;               // empty -> stdout (figure uses a prefix)
    std::uint64_t seed = 1;
    std::size_t paths = 100000;
    std::size_t steps_per_year = 365;
    std::string cache_path;
};

namespace detail {

inline const std::map<std::string, std::string>& flag_keys() {
    static const std::map<std::string, std::string> keys = {
        {"rights", "count"},     {"rate", "real"},           {"dividend", "real"},
        {"vol", "real"},         {"maturity", "real"},       {"strike", "real"},
        {"grid-steps", "count"}, {"x-min", "real"},          {"x-max", "real"},
        {"x-steps", "count"},    {"output", "string"},       {"out-file", "string"},
        {"seed", "count"},       {"paths", "count"},         {"steps-per-year", "count"},
        {"cache", "string"}};
    return keys;
}

inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_real = [&](const char* name) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &pos);
        } catch (const std::exception&) {
            throw UsageError(std::string("invalid value for ") + name + ": " + value);
        }
        if (pos != value.size())
            throw UsageError(std::string("invalid value for ") + name + ": " + value);
        return v;
    };
    auto as_count = [&](const char* name) -> std::uint64_t {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(value, &pos);
        } catch (const std::exception&) {
            throw UsageError(std::string("invalid value for ") + name + ": " + value);
        }
        if (pos != value.size() || v < 0)
            throw UsageError(std::string("invalid value for ") + name + ": " + value);
        return static_cast<std::uint64_t>(v);
    };
    if (key == "rights") cfg.rights = as_count("--rights");
    else if (key == "rate") cfg.params.rate = as_real("--rate");
    else if (key == "dividend") cfg.params.dividend = as_real("--dividend");
    else if (key == "vol") cfg.params.vol = as_real("--vol");
    else if (key == "maturity") {
        cfg.params.maturity = as_real("--maturity");
    } else if (key == "strike") cfg.params.strike = as_real("--strike");
    else if (key == "grid-steps") cfg.grid_steps = as_count("--grid-steps");
    else if (key == "x-min") cfg.x_min = as_real("--x-min");
    else if (key == "x-max") cfg.x_max = as_real("--x-max");
    else if (key == "x-steps") cfg.x_steps = as_count("--x-steps");
    else if (key == "output") cfg.output_format = value;
    else if (key == "out-file") cfg.out_file = value;
    else if (key == "seed") cfg.seed = as_count("--seed");
    else if (key == "paths") cfg.paths = as_count("--paths");
    else if (key == "steps-per-year") cfg.steps_per_year = as_count("--steps-per-year");
    else if (key == "cache") cfg.cache_path = value;
    else throw UsageError("unknown key: " + key);
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line is not key=value: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!flag_keys().count(key)) throw UsageError("unknown config key: " + key);
        kv[key] = value;
    }
    return kv;
}

}  // namespace detail

// Flags override config-file values; unknown flags or keys are hard errors.
inline RunConfig parse(const std::vector<std::string>& args) {
    static const std::vector<std::string> commands = {"boundary",       "price",     "parity",
                                                      "verify-lattice", "verify-mc", "figure"};
    if (args.empty()) throw UsageError("missing command (boundary|price|parity|verify-lattice|verify-mc|figure)");
    RunConfig cfg;
    cfg.command = args[0];
    bool known = false;
    for (const auto& c : commands) known = known || c == cfg.command;
    if (!known) throw UsageError("unknown command: " + cfg.command);

    std::map<std::string, std::string> cli_kv;
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string flag = args[i];
        if (flag.rfind("--", 0) != 0) throw UsageError("expected a flag, got: " + flag);
        flag.erase(0, 2);
        std::string value;
        const auto eq = flag.find('=');
        if (eq != std::string::npos) {
            value = flag.substr(eq + 1);
            flag.erase(eq);
        } else {
            if (i + 1 >= args.size()) throw UsageError("missing value for --" + flag);
            value = args[++i];
        }
        if (flag == "config") {
            config_path = value;
            continue;
        }
        if (!detail::flag_keys().count(flag)) throw UsageError("unknown flag: --" + flag);
        cli_kv[flag] = value;
    }

    if (!config_path.empty())
        for (const auto& [k, v] : detail::read_config_file(config_path))
            if (!cli_kv.count(k)) detail::apply_key(cfg, k, v);
    for (const auto& [k, v] : cli_kv) detail::apply_key(cfg, k, v);

    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (cfg.grid_steps < 2) throw UsageError("--grid-steps must be >= 2");
    if (cfg.x_steps < 1) throw UsageError("--x-steps must be >= 1");
    if (!(cfg.x_min > 0.0) || cfg.x_max < cfg.x_min) throw UsageError("invalid --x-min/--x-max range");
    if (cfg.output_format != "csv" && cfg.output_format != "json")
        throw UsageError("--output must be csv or json");
    if (cfg.paths < 1) throw UsageError("--paths must be >= 1");
    if (cfg.steps_per_year < 1) throw UsageError("--steps-per-year must be >= 1");
    return cfg;
}

namespace detail {

inline LadderSolution obtain_ladder(const RunConfig& cfg) {
    const TimeGrid grid(cfg.grid_steps, cfg.params.maturity);
    if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path)) {
        std::ifstream in(cfg.cache_path);
        ordered_json doc = ordered_json::parse(in);
        LadderSolution cached = ladder_from_json(doc);
        if (cached.params == cfg.params && cached.grid == grid &&
            cached.rights() >= cfg.rights)
            return cached;
    }
    LadderSolution sol = solve_ladder(cfg.rights, cfg.params, grid);
    if (!cfg.cache_path.empty()) {
        std::ofstream out(cfg.cache_path);
        out << ladder_to_json(sol).dump(2) << '\n';
    }
    return sol;
}

inline std::vector<double> spot_grid(const RunConfig& cfg) {
    std::vector<double> xs(cfg.x_steps);
    if (cfg.x_steps == 1) {
        xs[0] = cfg.x_min;
        return xs;
    }
    const double dx = (cfg.x_max - cfg.x_min) / static_cast<double>(cfg.x_steps - 1);
    for (std::size_t i = 0; i < cfg.x_steps; ++i)
        xs[i] = cfg.x_min + static_cast<double>(i) * dx;
    return xs;
}

inline void emit(const RunConfig& cfg, const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

inline std::string boundary_table(const LadderSolution& sol) {
    std::vector<std::string> header{"t"};
    std::vector<std::vector<double>> cols;
    std::vector<double> t;
    for (std::size_t k = 0; k <= sol.grid.n_steps; ++k) t.push_back(sol.grid.node(k));
    cols.push_back(t);
    for (std::size_t j = 1; j <= sol.rights(); ++j) {
        header.push_back("b_" + std::to_string(j));
        cols.push_back(sol.levels[j - 1].b.values);
    }
    std::ostringstream os;
    write_table_csv(os, header, cols);
    return os.str();
}

inline std::string price_table(const RunConfig& cfg, const LadderSolution& sol) {
    const std::vector<double> xs = spot_grid(cfg);
    std::vector<std::string> header{"x", "Ve"};
    std::vector<std::vector<double>> cols{xs, price_curve(0, 0.0, xs, sol)};
    for (std::size_t j = 1; j <= sol.rights(); ++j) {
        header.push_back("V_" + std::to_string(j));
        cols.push_back(price_curve(j, 0.0, xs, sol));
    }
    std::ostringstream os;
    write_table_csv(os, header, cols);
    return os.str();
}

}  // namespace detail

// Exit codes: 0 success, 1 verification failure, 2 usage error (thrown as
// UsageError before we get here).
inline int run(const RunConfig& cfg) {
    if (cfg.command == "boundary") {
        LadderSolution sol = detail::obtain_ladder(cfg);
        if (cfg.output_format == "json")
            detail::emit(cfg, ladder_to_json(sol).dump(2) + "\n", cfg.out_file);
        else
            detail::emit(cfg, detail::boundary_table(sol), cfg.out_file);
        return 0;
    }
    if (cfg.command == "price") {
        LadderSolution sol = detail::obtain_ladder(cfg);
        if (cfg.output_format == "json") {
            const std::vector<double> xs = detail::spot_grid(cfg);
            ordered_json doc;
            doc["params"] = params_to_json(cfg.params);
            doc["x"] = xs;
            doc["Ve"] = price_curve(0, 0.0, xs, sol);
            for (std::size_t j = 1; j <= sol.rights(); ++j)
                doc["V_" + std::to_string(j)] = price_curve(j, 0.0, xs, sol);
            detail::emit(cfg, doc.dump(2) + "\n", cfg.out_file);
        } else {
            detail::emit(cfg, detail::price_table(cfg, sol), cfg.out_file);
        }
        return 0;
    }
    if (cfg.command == "parity") {
        LadderSolution sol = detail::obtain_ladder(cfg);
        const double x0 = cfg.params.strike;  // at-the-money quote
        const double v_rp = price(cfg.rights, 0.0, x0, sol);
        const ParityQuote q = from_reset_put(v_rp, x0, cfg.params);
        ordered_json doc;
        doc["params"] = params_to_json(cfg.params);
        doc["rights"] = cfg.rights;
        doc["x0"] = q.x0;
        doc["parity_constant"] = parity_constant(x0, cfg.params);
        doc["reset_put"] = *q.reset_put;
        doc["shout_call"] = *q.shout_call;
        doc["shout_put"] = nullptr;   // needs an externally supplied reset-call price
        doc["reset_call"] = nullptr;
        detail::emit(cfg, doc.dump(2) + "\n", cfg.out_file);
        return 0;
    }
    if (cfg.command == "verify-lattice") {
        LadderSolution sol = detail::obtain_ladder(cfg);
        const LatticeSpec lspec;
        const std::vector<double> lat =
            lattice_multi_reset_levels(cfg.rights, cfg.params, lspec);
        const double tol = 5e-3 * cfg.params.strike;
        ordered_json report = ordered_json::array();
        bool all_pass = true;
        for (std::size_t j = 0; j <= cfg.rights; ++j) {
            const double ladder_price = price(j, 0.0, cfg.params.strike, sol);
            const double diff = std::abs(ladder_price - lat[j]);
            const bool pass = diff <= tol;
            all_pass = all_pass && pass;
            report.push_back(ordered_json{{"level", j},
                                          {"ladder", ladder_price},
                                          {"oracle", lat[j]},
                                          {"abs_diff", diff},
                                          {"tolerance", tol},
                                          {"pass", pass}});
        }
        detail::emit(cfg, report.dump(2) + "\n", cfg.out_file);
        return all_pass ? 0 : 1;
    }
    if (cfg.command == "verify-mc") {
        LadderSolution sol = detail::obtain_ladder(cfg);
        const double x0 = cfg.params.strike;
        McSpec spec{cfg.paths, cfg.steps_per_year, cfg.seed};
        const double ladder_price = price(cfg.rights, 0.0, x0, sol);
        const McEstimate est = mc_strategy_price(cfg.rights, sol, 0.0, x0, spec);
        McSpec fine = spec;
        fine.steps_per_year = 2 * spec.steps_per_year;
        const McEstimate est_fine = mc_strategy_price(cfg.rights, sol, 0.0, x0, fine);
        const double bias = std::abs(est_fine.mean - est.mean);
        const double lower = ladder_price - 3.0 * est.std_error - bias;
        const double upper = ladder_price + 3.0 * est.std_error;
        const bool pass = est.mean >= lower && est.mean <= upper;
        ordered_json doc{{"rights", cfg.rights},
                         {"ladder", ladder_price},
                         {"oracle", est.mean},
                         {"std_error", est.std_error},
                         {"bias", bias},
                         {"lower", lower},
                         {"upper", upper},
                         {"abs_diff", std::abs(est.mean - ladder_price)},
                         {"paths", est.paths},
                         {"seed", spec.rng_seed},
                         {"pass", pass}};
        detail::emit(cfg, doc.dump(2) + "\n", cfg.out_file);
        return pass ? 0 : 1;
    }
    if (cfg.command == "figure") {
        LadderSolution sol = detail::obtain_ladder(cfg);
        const std::string prefix = cfg.out_file.empty() ? "figure" : cfg.out_file;
        detail::emit(cfg, detail::price_table(cfg, sol), prefix + "_prices.csv");
        detail::emit(cfg, detail::boundary_table(sol), prefix + "_boundaries.csv");
        return 0;
    }
    throw UsageError("unknown command: " + cfg.command);
}

}  // namespace resetopt
