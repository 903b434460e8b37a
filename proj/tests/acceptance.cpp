// End-to-end acceptance suite. Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails. The Monte Carlo checks dominate
// the runtime (a few minutes single-threaded).

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "resetopt/analytics.hpp"
#include "resetopt/ladder.hpp"
#include "resetopt/lattice.hpp"
#include "resetopt/monte_carlo.hpp"
#include "resetopt/parity.hpp"

using namespace resetopt;

namespace {

const ModelParams base{0.03, 0.04, 0.4, 1.0, 1.0};

int failures = 0;

void report(int idx, const char* title, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", idx, title,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Lognormal-integration European put oracle (Simpson on the payoff region).
double put_by_quadrature(double t, double x, double strike, const ModelParams& p) {
    const double tau = p.maturity - t;
    if (tau == 0.0) return std::max(strike - x, 0.0);
    const double s = p.vol * std::sqrt(tau);
    const double mu = (p.rate - p.dividend - 0.5 * p.vol * p.vol) * tau;
    // payoff positive for z < z_star
    const double z_star = (std::log(strike / x) - mu) / s;
    const double lo = std::min(z_star, 0.0) - 12.0;
    const std::size_t n = 40000;  // even
    const double h = (z_star - lo) / static_cast<double>(n);
    auto f = [&](double z) {
        return std::max(strike - x * std::exp(mu + s * z), 0.0) * norm_pdf(z);
    };
    double sum = f(lo) + f(z_star);
    for (std::size_t i = 1; i < n; ++i)
        sum += f(lo + static_cast<double>(i) * h) * ((i % 2) ? 4.0 : 2.0);
    return std::exp(-p.rate * tau) * sum * h / 3.0;
}

}  // namespace

int main() {
    const std::size_t rights = 4;

    // Solutions reused across checks.
    const TimeGrid grid400(400, base.maturity);
    const LadderSolution sol400 = solve_ladder(rights, base, grid400);

    // 1. Terminal boundary value is exact and the last pre-maturity gap
    //    shrinks monotonically under grid refinement.
    {
        bool pass = true;
        std::string detail;
        std::vector<double> prev_gap(rights, 0.0);
        bool first = true;
        for (std::size_t n_steps : {100u, 200u, 400u, 800u}) {
            const TimeGrid g(n_steps, base.maturity);
            const LadderSolution sol =
                (n_steps == 400) ? sol400 : solve_ladder(rights, base, g);
            for (std::size_t j = 1; j <= rights; ++j) {
                const BoundaryCurve& b = sol.levels[j - 1].b;
                if (b.interpolate(base.maturity) != base.strike) pass = false;
                const double gap = b.values[n_steps - 1] - base.strike;
                if (!(gap > 0.0)) pass = false;
                if (!first && !(gap < prev_gap[j - 1])) pass = false;
                prev_gap[j - 1] = gap;
            }
            first = false;
        }
        report(1, "terminal boundary pin and refinement monotonicity", pass,
               "last gap at N=800: " + num(prev_gap[0]) + " .. " + num(prev_gap[3]));
    }

    // 2. Boundaries decrease in time and in the number of remaining rights.
    {
        bool time_mono = true, level_mono = true;
        for (std::size_t j = 1; j <= rights; ++j) {
            const auto& v = sol400.levels[j - 1].b.values;
            for (std::size_t k = 0; k < grid400.n_steps; ++k)
                if (!(v[k] >= v[k + 1])) time_mono = false;
            if (j < rights) {
                const auto& w = sol400.levels[j].b.values;
                for (std::size_t k = 0; k <= grid400.n_steps; ++k)
                    if (!(w[k] <= v[k] + 1e-8 * base.strike)) level_mono = false;
            }
        }
        report(2, "boundary monotonicity in t and in rights", time_mono && level_mono,
               std::string("time: ") + (time_mono ? "ok" : "violated") +
                   ", levels: " + (level_mono ? "ok" : "violated"));
    }

    // 3. Price ordering and U-shape across spot.
    {
        std::vector<double> xs;
        for (int i = 0; i <= 15; ++i) xs.push_back(0.5 + 0.1 * i);
        std::vector<std::vector<double>> v(rights + 1);
        for (std::size_t j = 0; j <= rights; ++j) v[j] = price_curve(j, 0.0, xs, sol400);
        bool ordered = true, ushape = true;
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = 1; j <= rights; ++j)
                if (!(v[j][i] >= v[j - 1][i] - 1e-6)) ordered = false;
        for (std::size_t j = 1; j <= rights; ++j) {
            int sign_changes = 0;
            for (std::size_t i = 2; i < xs.size(); ++i) {
                const double d_prev = v[j][i - 1] - v[j][i - 2];
                const double d = v[j][i] - v[j][i - 1];
                if (d_prev < 0.0 && d >= 0.0) ++sign_changes;
                if (d_prev >= 0.0 && d < 0.0) ++sign_changes;
            }
            if (sign_changes != 1) ushape = false;
        }
        report(3, "price ordering in rights and U-shape in spot", ordered && ushape,
               "V_4(1) = " + num(v[4][5]) + ", Ve(1) = " + num(v[0][5]));
    }

    // 4. Agreement with the lattice oracle.
    {
        const LatticeSpec lspec{500, 1000, 6.0};
        const std::vector<double> lat = lattice_multi_reset_levels(2, base, lspec);
        bool pass = true;
        std::string detail;
        for (std::size_t j : {1u, 2u}) {
            const double ladder = price(j, 0.0, base.strike, sol400);
            const double diff = std::abs(ladder - lat[j]);
            if (!(diff <= 5e-3 * base.strike)) pass = false;
            if (!detail.empty()) detail += ", ";
            detail += "|d" + std::to_string(j) + "| = " + num(diff);
        }
        report(4, "lattice oracle equivalence within 5e-3", pass, detail);
    }

    // 5. Agreement with the Monte Carlo oracle, bias measured by step doubling.
    {
        bool pass = true;
        std::string detail;
        for (std::size_t j : {1u, 2u}) {
            const double ladder = price(j, 0.0, base.strike, sol400);
            McSpec spec{1000000, 365, 1};
            const McEstimate est = mc_strategy_price(j, sol400, 0.0, base.strike, spec);
            McSpec fine = spec;
            fine.steps_per_year = 730;
            const McEstimate est_fine =
                mc_strategy_price(j, sol400, 0.0, base.strike, fine);
            const double bias = std::abs(est_fine.mean - est.mean);
            const double lower = ladder - 3.0 * est.std_error - bias;
            const double upper = ladder + 3.0 * est.std_error;
            if (!(est.mean >= lower && est.mean <= upper)) pass = false;
            if (!detail.empty()) detail += ", ";
            detail += "j=" + std::to_string(j) + ": mc " + num(est.mean) + " vs " +
                      num(ladder) + " (se " + num(est.std_error) + ", bias " + num(bias) +
                      ")";
        }
        report(5, "Monte Carlo oracle equivalence within 3 SE + bias", pass, detail);
    }

    // 6. Parity identities: constructional and pathwise.
    {
        const double x0 = 1.1;
        const double c = parity_constant(x0, base);
        const ParityQuote q = from_reset_put(0.21, x0, base);
        const double v_sp = pair_put_side(0.33, x0, base);
        const bool constructional =
            std::abs((*q.reset_put - *q.shout_call) - c) <= 1e-14 * std::abs(c) &&
            std::abs((v_sp - 0.33) - c) <= 1e-14 * std::abs(c);

        McSpec spec{200000, 365, 17};
        const McStrategyResult res = mc_strategy_run(2, sol400, 0.0, base.strike, spec);
        const double c_atm = parity_constant(base.strike, base);
        const double dev = std::abs(res.parity_diff.mean - c_atm);
        const bool pathwise = dev <= 3.0 * res.parity_diff.std_error;
        report(6, "reset/shout parity, constructional and pathwise",
               constructional && pathwise,
               "pathwise |diff - c| = " + num(dev) + " vs 3 se = " +
                   num(3.0 * res.parity_diff.std_error));
    }

    // 7. Closed forms against independent numerics.
    {
        bool h1_ok = true;
        double worst = 0.0;
        const double fd = 1e-6;
        for (int i = 0; i <= 200; ++i) {
            const double t = (base.maturity - 0.01) * i / 200.0;
            double deriv;
            if (t < fd)
                deriv = (-3.0 * unit_put(t, base) + 4.0 * unit_put(t + fd, base) -
                         unit_put(t + 2.0 * fd, base)) /
                        (2.0 * fd);
            else
                deriv = (unit_put(t + fd, base) - unit_put(t - fd, base)) / (2.0 * fd);
            const double lhs = h1(t, base);
            const double rhs = deriv - base.dividend * unit_put(t, base);
            const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-3);
            worst = std::max(worst, rel);
            if (rel > 1e-5) h1_ok = false;
        }

        bool put_ok = true;
        double worst_put = 0.0;
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> ut(0.0, 0.9), ux(0.5, 2.0);
        for (int i = 0; i < 10; ++i) {
            const double t = ut(rng), x = ux(rng), strike = ux(rng);
            const double diff =
                std::abs(european_put(t, x, strike, base) - put_by_quadrature(t, x, strike, base));
            worst_put = std::max(worst_put, diff);
            if (diff > 1e-8) put_ok = false;
        }
        report(7, "closed-form h1 and European put cross-checks", h1_ok && put_ok,
               "h1 worst rel " + num(worst) + ", put worst abs " + num(worst_put));
    }

    // 8. Value matching and smooth fit on the solved boundaries.
    {
        bool vm_ok = true, sf_ok = true;
        double worst_vm = 0.0, worst_sf = 0.0;
        const double eps = 1e-4 * base.strike;
        for (std::size_t j = 1; j <= rights; ++j) {
            const BoundaryCurve& b = sol400.levels[j - 1].b;
            for (std::size_t k = 0; k < grid400.n_steps; ++k) {
                if (b.is_infinite(k)) continue;
                const double t = grid400.node(k);
                const double bk = b.values[k];
                const double mult =
                    unit_put(t, base) +
                    (j >= 2 ? sol400.levels[j - 2].premium.p[k] : 0.0);
                const double vm = std::abs(price(j, t, bk, sol400) - bk * mult);
                worst_vm = std::max(worst_vm, vm);
                if (vm > 1e-6) vm_ok = false;
                if (t <= base.maturity - 0.05) {
                    const double slope =
                        (price(j, t, bk + eps, sol400) - price(j, t, bk - eps, sol400)) /
                        (2.0 * eps);
                    const double sf = std::abs(slope - mult);
                    worst_sf = std::max(worst_sf, sf);
                    if (sf > 5e-3) sf_ok = false;
                }
            }
        }
        report(8, "value matching and smooth fit at the boundary", vm_ok && sf_ok,
               "worst matching " + num(worst_vm) + ", worst fit " + num(worst_sf));
    }

    // 9. Homogeneity: doubling spot and strike doubles the price.
    {
        ModelParams scaled = base;
        scaled.strike = 2.0 * base.strike;
        const LadderSolution sol2 = solve_ladder(rights, scaled, grid400);
        bool pass = true;
        double worst = 0.0;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ut(0.0, 0.95), ux(0.5, 2.0);
        for (int i = 0; i < 10; ++i) {
            const double t = ut(rng), x = ux(rng);
            const double diff = std::abs(price(rights, t, 2.0 * x, sol2) -
                                         2.0 * price(rights, t, x, sol400));
            worst = std::max(worst, diff);
            if (diff > 1e-6) pass = false;
        }
        report(9, "price homogeneity under lambda = 2 scaling", pass,
               "worst abs diff " + num(worst));
    }

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
