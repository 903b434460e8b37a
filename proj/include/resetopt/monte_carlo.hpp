#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "resetopt/analytics.hpp"
#include "resetopt/ladder.hpp"
#include "resetopt/model.hpp"

namespace resetopt {

// Substreams are derived from (rng_seed, path index), so estimates depend only
// on (seed, paths, steps) and never on scheduling.
inline constexpr const char* kMcRngAlgorithm = "mt19937_64/seed_seq(seed,path)";

struct McSpec {
    std::size_t paths = 100000;
    std::size_t steps_per_year = 365;
    std::uint64_t rng_seed = 1;

    void validate() const {
        if (paths < 1) throw std::invalid_argument("McSpec: paths must be >= 1");
        if (steps_per_year < 1) throw std::invalid_argument("McSpec: steps_per_year must be >= 1");
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
};

namespace detail {

inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    return std::mt19937_64(seq);
}

inline McEstimate estimate_from(double sum, double sum_sq, std::size_t n) {
    const double mean = sum / static_cast<double>(n);
    double se = 0.0;
    if (n > 1) {
        const double var = (sum_sq - sum * mean) / static_cast<double>(n - 1);
        se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
    return McEstimate{mean, se, n};
}

}  // namespace detail

// Plain European put by simulating the exact terminal lognormal draw.
inline McEstimate mc_european(const ModelParams& p, double t, double x, double strike,
                              const McSpec& spec) {
    p.validate();
    spec.validate();
    if (strike <= 0.0) return McEstimate{0.0, 0.0, spec.paths};
    const double tau = p.maturity - t;
    if (tau < 0.0) throw std::domain_error("mc_european: t > maturity");
    const double drift = (p.rate - p.dividend - 0.5 * p.vol * p.vol) * tau;
    const double sd = p.vol * std::sqrt(tau);
    const double disc = std::exp(-p.rate * tau);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < spec.paths; ++i) {
        auto eng = detail::path_engine(spec.rng_seed, i);
        std::normal_distribution<double> normal;
        const double xT = x * std::exp(drift + sd * normal(eng));
        const double pay = disc * std::max(strike - xT, 0.0);
        sum += pay;
        sum_sq += pay * pay;
    }
    return detail::estimate_from(sum, sum_sq, spec.paths);
}

// Joint result of one strategy simulation: the reset-put estimate, the
// shout-call payoff evaluated at the same reset times, and the pathwise
// difference whose mean must equal K e^{-rT} - x e^{-delta T}.
struct McStrategyResult {
    McEstimate reset_put;
    McEstimate shout_call;
    McEstimate parity_diff;
};

// Simulates exact GBM increments on a uniform monitoring grid and exercises
// the solved boundaries with the strike-update rule: with j rights left and
// current strike K_cur, reset when X_s >= (K_cur / K) b_j(s); then the strike
// becomes X_s and one right is consumed. Infinite boundary brackets mean "do
// not reset". The final payoff is (K_cur - X_T)^+ discounted.
inline McStrategyResult mc_strategy_run(std::size_t n, const LadderSolution& sol, double t,
                                        double x, const McSpec& spec) {
    spec.validate();
    if (n > sol.rights()) throw std::domain_error("mc_strategy_run: not enough solved levels");
    if (!(x > 0.0)) throw std::domain_error("mc_strategy_run: spot must be > 0");
    const ModelParams& p = sol.params;
    const double tau = p.maturity - t;
    if (!(tau > 0.0)) throw std::domain_error("mc_strategy_run: t must precede maturity");
    const std::size_t steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::ceil(static_cast<double>(spec.steps_per_year) * tau)));
    const double dt = tau / static_cast<double>(steps);
    const double drift = (p.rate - p.dividend - 0.5 * p.vol * p.vol) * dt;
    const double sd = p.vol * std::sqrt(dt);
    const double disc = std::exp(-p.rate * tau);
    const double ln_strike = std::log(p.strike);

    // log boundary per level at each monitoring time s = 0..steps-1
    std::vector<std::vector<double>> lb(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
        lb[j].resize(steps);
        const BoundaryCurve& b = sol.levels[j - 1].b;
        for (std::size_t s = 0; s < steps; ++s) {
            const double ts = t + static_cast<double>(s) * dt;
            double v;
            try {
                v = std::log(b.interpolate(ts));
            } catch (const std::domain_error&) {
                v = std::numeric_limits<double>::infinity();
            }
            lb[j][s] = v;
        }
    }

    double s_rp = 0.0, s2_rp = 0.0, s_sc = 0.0, s2_sc = 0.0, s_d = 0.0, s2_d = 0.0;
    for (std::size_t path = 0; path < spec.paths; ++path) {
        auto eng = detail::path_engine(spec.rng_seed, path);
        std::normal_distribution<double> normal;
        double ln_x = std::log(x);
        double ln_kcur = ln_strike;
        std::size_t j = n;
        for (std::size_t s = 0; s < steps; ++s) {
            if (j > 0 && ln_x >= lb[j][s] + ln_kcur - ln_strike) {
                ln_kcur = ln_x;
                --j;
            }
            ln_x += drift + sd * normal(eng);
        }
        const double xT = std::exp(ln_x);
        const double kcur = std::exp(ln_kcur);
        const double pay_rp = disc * std::max(kcur - xT, 0.0);
        const double pay_sc = disc * (std::max(kcur, xT) - p.strike);
        const double d = pay_rp - pay_sc;
        s_rp += pay_rp;
        s2_rp += pay_rp * pay_rp;
        s_sc += pay_sc;
        s2_sc += pay_sc * pay_sc;
        s_d += d;
        s2_d += d * d;
    }
    return McStrategyResult{detail::estimate_from(s_rp, s2_rp, spec.paths),
                            detail::estimate_from(s_sc, s2_sc, spec.paths),
                            detail::estimate_from(s_d, s2_d, spec.paths)};
}

inline McEstimate mc_strategy_price(std::size_t n, const LadderSolution& sol, double t, double x,
                                    const McSpec& spec) {
    if (n == 0) return mc_european(sol.params, t, x, sol.params.strike, spec);
    return mc_strategy_run(n, sol, t, x, spec).reset_put;
}

}  // namespace resetopt
