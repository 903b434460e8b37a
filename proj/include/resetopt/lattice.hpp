#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "resetopt/analytics.hpp"
#include "resetopt/model.hpp"

namespace resetopt {

// Backward-induction lattice in log-moneyness y = x/K. The strike dimension is
// collapsed by homogeneity: resetting at state y is worth y times the
// at-the-money value of the option with one right fewer.
struct LatticeSpec {
    std::size_t time_steps = 500;
    std::size_t log_moneyness_nodes = 1000;
    double log_moneyness_halfwidth = 6.0;  // in units of sigma sqrt(T)

    void validate() const {
        if (time_steps < 2 || log_moneyness_nodes < 2)
            throw std::invalid_argument("LatticeSpec: counts must be >= 2");
        if (!(log_moneyness_halfwidth >= 5.0))
            throw std::invalid_argument("LatticeSpec: halfwidth must be >= 5");
    }
};

namespace detail {

// One-step transition weights: the expectation of the piecewise-linear
// interpolant under a N(mu_dt, sd^2) log-increment is a convolution with the
// Gaussian integrals of the hat basis, computed in closed form.
inline std::vector<double> hat_weights(double mu_dt, double sd, double dy, long& m_lo) {
    const double reach = 8.0 * sd;
    m_lo = static_cast<long>(std::floor((mu_dt - reach) / dy)) - 1;
    const long m_hi = static_cast<long>(std::ceil((mu_dt + reach) / dy)) + 1;
    auto cdf = [&](double z) { return norm_cdf((z - mu_dt) / sd); };
    auto pdf = [&](double z) { return norm_pdf((z - mu_dt) / sd); };
    // P = int phi over [a,b]; M1 = int z phi over [a,b]
    auto prob = [&](double a, double b) { return cdf(b) - cdf(a); };
    auto mom1 = [&](double a, double b) {
        return mu_dt * prob(a, b) + sd * (pdf(a) - pdf(b));
    };
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(m_hi - m_lo + 1));
    for (long m = m_lo; m <= m_hi; ++m) {
        const double c = static_cast<double>(m) * dy;
        const double left = (mom1(c - dy, c) - (c - dy) * prob(c - dy, c)) / dy;
        const double right = ((c + dy) * prob(c, c + dy) - mom1(c, c + dy)) / dy;
        w.push_back(left + right);
    }
    return w;
}

}  // namespace detail

// Prices of the reset put at (t = 0, x = K) for every level 0..n. Level 0 is
// the European put by pure backward induction; level j takes the maximum of
// continuation and the reset value y * w_{j-1}(t, 1).
inline std::vector<double> lattice_multi_reset_levels(std::size_t n, const ModelParams& p,
                                                      const LatticeSpec& spec) {
    p.validate();
    spec.validate();
    const double T = p.maturity;
    const double s_total = p.vol * std::sqrt(T);
    const double H = spec.log_moneyness_halfwidth * s_total;
    const std::size_t M = spec.log_moneyness_nodes;
    const std::size_t P = spec.time_steps;
    const double dy = 2.0 * H / static_cast<double>(M - 1);
    const double dt = T / static_cast<double>(P);
    const double mu = p.rate - p.dividend - 0.5 * p.vol * p.vol;

    // truncation estimate: lognormal mass escaping the grid from the center
    const double trunc = 2.0 * norm_cdf(-(H - std::abs(mu) * T) / s_total) * p.strike;
    if (trunc > 1e-6 * p.strike)
        throw std::runtime_error("lattice_multi_reset: grid halfwidth too small");

    std::vector<double> lny(M);
    for (std::size_t i = 0; i < M; ++i) lny[i] = -H + static_cast<double>(i) * dy;
    // resampling onto the grid each step convolves with a hat kernel of
    // variance dy^2/6; shrink the transition variance to compensate
    const double step_var = p.vol * p.vol * dt - dy * dy / 6.0;
    if (!(step_var > 0.0))
        throw std::runtime_error("lattice_multi_reset: grid too coarse for the time step");
    long m_lo = 0;
    const std::vector<double> w = detail::hat_weights(mu * dt, std::sqrt(step_var), dy, m_lo);
    const double disc = std::exp(-p.rate * dt);

    auto atm_of = [&](const std::vector<double>& vals) {
        // interpolate at lny = 0
        const double pos = H / dy;
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < M ? (1.0 - frac) * vals[i] + frac * vals[i + 1] : vals[M - 1];
    };

    std::vector<double> results;
    std::vector<double> atm_prev(P + 1, 0.0), atm_cur(P + 1, 0.0);
    std::vector<double> vals(M), next(M);

    for (std::size_t level = 0; level <= n; ++level) {
        // last step analytically: continuation at T - dt is a one-period
        // European put, which keeps the terminal payoff kink out of the
        // interpolant
        atm_cur[P] = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            double v = european_put(T - dt, std::exp(lny[i]), 1.0,
                                    ModelParams{p.rate, p.dividend, p.vol, T, 1.0});
            if (level > 0) v = std::max(v, std::exp(lny[i]) * atm_prev[P - 1]);
            vals[i] = v;
        }
        atm_cur[P - 1] = atm_of(vals);
        for (std::size_t step = P - 1; step-- > 0;) {
            // values being read live at calendar time t_{step+1}
            const double tau_rem = T - static_cast<double>(step + 1) * dt;
            // clamp values outside the grid at the time level being read
            auto read = [&](long idx) {
                if (idx >= 0 && idx < static_cast<long>(M)) return vals[static_cast<std::size_t>(idx)];
                const double ly = -H + static_cast<double>(idx) * dy;
                if (idx < 0)
                    return std::exp(-p.rate * tau_rem) - std::exp(ly - p.dividend * tau_rem);
                return level == 0 ? 0.0 : std::exp(ly) * atm_prev[step + 1];
            };
            for (std::size_t i = 0; i < M; ++i) {
                double acc = 0.0;
                for (std::size_t q = 0; q < w.size(); ++q)
                    acc += w[q] * read(static_cast<long>(i) + m_lo + static_cast<long>(q));
                double v = disc * acc;
                if (level > 0) v = std::max(v, std::exp(lny[i]) * atm_prev[step]);
                next[i] = v;
            }
            vals.swap(next);
            atm_cur[step] = atm_of(vals);
        }
        results.push_back(p.strike * atm_cur[0]);
        atm_prev.swap(atm_cur);
    }
    return results;
}

inline double lattice_multi_reset(std::size_t n, const ModelParams& p, const LatticeSpec& spec) {
    return lattice_multi_reset_levels(n, p, spec).back();
}

}  // namespace resetopt
