#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "resetopt/boundary.hpp"
#include "resetopt/grid.hpp"
#include "resetopt/ladder.hpp"
#include "resetopt/model.hpp"

namespace resetopt {

using ordered_json = nlohmann::ordered_json;

// 17 significant digits: round-trips any double exactly. Infinities print as
// the literal "inf".
inline std::string fmt_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_boundary_csv(std::ostream& os, const BoundaryCurve& curve) {
    os << "t,b\n";
    for (std::size_t k = 0; k <= curve.grid.n_steps; ++k)
        os << fmt_double(curve.grid.node(k)) << ',' << fmt_double(curve.values[k]) << '\n';
}

// Generic table: columns[c][row], one header entry per column.
inline void write_table_csv(std::ostream& os, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& columns) {
    for (std::size_t c = 0; c < header.size(); ++c)
        os << (c ? "," : "") << header[c];
    os << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << fmt_double(columns[c][r]);
        os << '\n';
    }
}

inline ordered_json params_to_json(const ModelParams& p) {
    return ordered_json{{"rate", p.rate},
                        {"dividend", p.dividend},
                        {"vol", p.vol},
                        {"maturity", p.maturity},
                        {"strike", p.strike}};
}

inline ModelParams params_from_json(const ordered_json& j) {
    ModelParams p;
    p.rate = j.at("rate").get<double>();
    p.dividend = j.at("dividend").get<double>();
    p.vol = j.at("vol").get<double>();
    p.maturity = j.at("maturity").get<double>();
    p.strike = j.at("strike").get<double>();
    return p;
}

inline ordered_json boundary_values_to_json(const std::vector<double>& values) {
    ordered_json arr = ordered_json::array();
    for (double v : values) {
        if (std::isinf(v))
            arr.push_back("inf");
        else
            arr.push_back(v);
    }
    return arr;
}

inline std::vector<double> boundary_values_from_json(const ordered_json& arr) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr)
        out.push_back(v.is_string() ? kInfiniteBoundary : v.get<double>());
    return out;
}

inline ordered_json ladder_to_json(const LadderSolution& sol) {
    ordered_json doc;
    doc["params"] = params_to_json(sol.params);
    doc["grid"] = ordered_json{{"n_steps", sol.grid.n_steps}, {"maturity", sol.grid.maturity}};
    ordered_json levels = ordered_json::array();
    for (const auto& lev : sol.levels) {
        ordered_json t = ordered_json::array();
        for (std::size_t k = 0; k <= sol.grid.n_steps; ++k) t.push_back(sol.grid.node(k));
        levels.push_back(ordered_json{{"t", t},
                                      {"b", boundary_values_to_json(lev.b.values)},
                                      {"p", lev.premium.p},
                                      {"p_prime", lev.premium.p_prime}});
    }
    doc["levels"] = levels;
    return doc;
}

// Rebuilds the full solution, recomputing each level's h tabulation from the
// previous premium curve exactly as the solver does.
inline LadderSolution ladder_from_json(const ordered_json& doc) {
    const ModelParams params = params_from_json(doc.at("params"));
    const TimeGrid grid(doc.at("grid").at("n_steps").get<std::size_t>(),
                        doc.at("grid").at("maturity").get<double>());
    LadderSolution sol{params, grid, {}};
    const std::size_t N = grid.n_steps;
    PremiumCurve prev{grid, std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, 0.0)};
    for (const auto& lev : doc.at("levels")) {
        std::vector<double> h_mid = tabulate_h(prev, params, grid);
        BoundaryCurve b{grid, boundary_values_from_json(lev.at("b")), params.strike};
        if (b.values.size() != N + 1)
            throw std::runtime_error("ladder_from_json: boundary size mismatch");
        PremiumCurve p{grid, lev.at("p").get<std::vector<double>>(),
                       lev.at("p_prime").get<std::vector<double>>()};
        if (p.p.size() != N + 1 || p.p_prime.size() != N + 1)
            throw std::runtime_error("ladder_from_json: premium size mismatch");
        sol.levels.push_back(LadderLevel{std::move(h_mid), std::move(b), p});
        prev = std::move(p);
    }
    return sol;
}

}  // namespace resetopt
