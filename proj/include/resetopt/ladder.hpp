#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "resetopt/analytics.hpp"
#include "resetopt/boundary.hpp"
#include "resetopt/grid.hpp"
#include "resetopt/model.hpp"

namespace resetopt {

// Normalized at-the-money reset premium p_n and its numerical derivative,
// tabulated on the grid nodes.
struct PremiumCurve {
    TimeGrid grid;
    std::vector<double> p;        // p(t_k), k = 0..N, with p(t_N) = 0
    std::vector<double> p_prime;  // finite-difference derivative at t_k
};

struct LadderLevel {
    std::vector<double> h_mid;  // h_j(u_l) at quadrature midpoints
    BoundaryCurve b;
    PremiumCurve premium;
};

// Full output of the multi-right recursion: levels[j-1] holds {h_j, b_j, p_j}.
struct LadderSolution {
    ModelParams params;
    TimeGrid grid;
    std::vector<LadderLevel> levels;

    std::size_t rights() const noexcept { return levels.size(); }
};

inline double interp_on_grid(const TimeGrid& grid, const std::vector<double>& vals, double t) {
    const double dt = grid.delta();
    std::size_t k = static_cast<std::size_t>(t / dt);
    if (k >= grid.n_steps) k = grid.n_steps - 1;
    const double w = (t - grid.node(k)) / dt;
    return (1.0 - w) * vals[k] + w * vals[k + 1];
}

// p_n(t_k) = -Delta sum_{l=k}^{N-1} e^{-delta(u_l - t_k)} h(u_l) Qhat_{t_k,K}(X_{u_l} >= b(u_l)),
// spot fixed at the strike. Subintervals where the boundary is infinite
// contribute nothing.
inline PremiumCurve premium(const BoundaryCurve& b, const std::vector<double>& h_mid,
                            const TimeGrid& grid, const ModelParams& params);

// Central differences at interior nodes, second-order one-sided at the ends.
inline std::vector<double> derivative(const std::vector<double>& vals, const TimeGrid& grid) {
    const std::size_t n = grid.n_steps;
    if (vals.size() != n + 1) throw std::invalid_argument("derivative: size mismatch");
    const double dt = grid.delta();
    std::vector<double> d(n + 1);
    d[0] = (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * dt);
    for (std::size_t k = 1; k < n; ++k) d[k] = (vals[k + 1] - vals[k - 1]) / (2.0 * dt);
    d[n] = (3.0 * vals[n] - 4.0 * vals[n - 1] + vals[n - 2]) / (2.0 * dt);
    return d;
}

// h_{n+1}(t) = h_1(t) + p'_n(t) - delta p_n(t). The singular part of the time
// derivative lives entirely in the closed-form h_1; only the smooth premium is
// differenced.
inline std::function<double(double)> h_next(const PremiumCurve& prev, const ModelParams& params) {
    return [prev, params](double t) {
        if (t >= params.maturity) throw std::domain_error("h_next: t must be < maturity");
        return h1(t, params) + interp_on_grid(prev.grid, prev.p_prime, t) -
               params.dividend * interp_on_grid(prev.grid, prev.p, t);
    };
}

// Quadrature tabulation of h_{n+1} as subinterval averages (product
// integration). The closed-form h_1 part enters through its exact average --
// it is steep like (T-u)^{-1/2} near maturity and midpoint samples
// systematically under-weight it. The premium part p' - delta p is averaged
// exactly over the piecewise-linear interpolant of p: the p' average
// telescopes to (p_{l+1} - p_l)/Delta and the p average is the trapezoid.
// This keeps the discrete quadrature consistent with the identity
// int_t^T e^{-delta(u-t)} h_{n+1} du = -(V^e + p_n)(t), on which the
// existence of a residual root depends: the residual above the boundary is
// identically zero in the continuum, so any inconsistency of the wrong sign
// would wipe out the root entirely.
inline std::vector<double> tabulate_h(const PremiumCurve& prev, const ModelParams& params,
                                      const TimeGrid& grid) {
    const std::size_t N = grid.n_steps;
    const double dt = grid.delta();
    std::vector<double> h_mid(N);
    for (std::size_t l = 0; l < N; ++l) {
        h_mid[l] = h1_average(grid.node(l), grid.node(l + 1), params) +
                   (prev.p[l + 1] - prev.p[l]) / dt -
                   params.dividend * 0.5 * (prev.p[l] + prev.p[l + 1]);
    }
    return h_mid;
}

inline PremiumCurve premium(const BoundaryCurve& b, const std::vector<double>& h_mid,
                            const TimeGrid& grid, const ModelParams& params) {
    if (b.grid != grid) throw std::domain_error("premium: boundary solved on a different grid");
    if (h_mid.size() != grid.n_steps) throw std::invalid_argument("premium: h tabulation mismatch");
    const std::size_t n = grid.n_steps;
    const double dt = grid.delta();
    const double K = params.strike;
    std::vector<double> p(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t_k = grid.node(k);
        double sum = 0.0;
        for (std::size_t l = k; l < n; ++l) {
            if (b.is_infinite(l) || b.is_infinite(l + 1)) continue;
            sum += h_mid[l] * discounted_tail_average(t_k, grid.node(l), grid.node(l + 1), K,
                                                      b.values[l], b.values[l + 1], params,
                                                      /*sqrt_shape=*/l + 1 == n);
        }
        p[k] = -dt * sum;
    }
    return PremiumCurve{grid, p, derivative(p, grid)};
}

// Steps of the recursion: h_1 -> b_1 -> (p_1, p_1') -> h_2 -> b_2 -> ...
// n = 0 yields the empty ladder (pure European pricing).
inline LadderSolution solve_ladder(std::size_t n, const ModelParams& params,
                                   const TimeGrid& grid) {
    params.validate();
    if (std::abs(grid.maturity - params.maturity) > 0.0)
        throw std::invalid_argument("solve_ladder: grid maturity differs from params");
    LadderSolution sol{params, grid, {}};
    sol.levels.reserve(n);
    const std::size_t N = grid.n_steps;

    PremiumCurve prev{grid, std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, 0.0)};
    for (std::size_t j = 1; j <= n; ++j) {
        std::vector<double> h_mid = tabulate_h(prev, params, grid);

        std::vector<double> mult(N + 1);
        for (std::size_t k = 0; k <= N; ++k) mult[k] = unit_put(grid.node(k), params) + prev.p[k];

        BoundaryCurve b = [&] {
            try {
                return solve_boundary(LevelInputs{h_mid, mult, params}, grid);
            } catch (const SolverError& e) {
                throw SolverError("level " + std::to_string(j) + ": " + e.what(), e.grid_index);
            }
        }();
        PremiumCurve p = premium(b, h_mid, grid, params);
        sol.levels.push_back(LadderLevel{std::move(h_mid), std::move(b), p});
        prev = std::move(p);
    }
    return sol;
}

// Reset premium representation:
//   V_j(t, x) = V^e(t, x; K) + Delta sum_{u_l > t} L_j(t, u_l, x, b_j(u_l)).
// At t = T this is the terminal payoff (K - x)^+; j = 0 is the European put.
inline double price(std::size_t j, double t, double x, const LadderSolution& sol) {
    if (j > sol.rights()) throw std::domain_error("price: level exceeds solved rights");
    if (t < 0.0 || t > sol.params.maturity) throw std::domain_error("price: t outside [0, T]");
    if (!(x > 0.0)) throw std::domain_error("price: spot must be > 0");
    const double K = sol.params.strike;
    if (t == sol.params.maturity) return std::max(K - x, 0.0);
    double v = european_put(t, x, K, sol.params);
    if (j == 0) return v;
    const LadderLevel& lev = sol.levels[j - 1];
    double quad = 0.0;
    for (std::size_t l = 0; l < sol.grid.n_steps; ++l) {
        const double t_r = sol.grid.node(l + 1);
        if (t_r <= t) continue;
        if (lev.b.is_infinite(l) || lev.b.is_infinite(l + 1)) continue;
        const bool last = l + 1 == sol.grid.n_steps;
        double t_l = sol.grid.node(l);
        double b_l = lev.b.values[l];
        if (t_l < t) {  // partial first subinterval when t is not a node
            const double frac = (t_r - t) / sol.grid.delta();
            const double w = last ? std::sqrt(frac) : frac;  // match the quadrature shape
            b_l = lev.b.values[l + 1] + (lev.b.values[l] - lev.b.values[l + 1]) * w;
            t_l = t;
        }
        quad += -x * lev.h_mid[l] * (t_r - t_l) *
                discounted_tail_average(t, t_l, t_r, x, b_l, lev.b.values[l + 1], sol.params,
                                        last);
    }
    return v + quad;
}

inline std::vector<double> price_curve(std::size_t j, double t, const std::vector<double>& x_grid,
                                       const LadderSolution& sol) {
    if (x_grid.empty()) throw std::invalid_argument("price_curve: empty spot grid");
    std::vector<double> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) out.push_back(price(j, t, x, sol));
    return out;
}

}  // namespace resetopt
