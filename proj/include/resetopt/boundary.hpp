#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "resetopt/analytics.hpp"
#include "resetopt/grid.hpp"
#include "resetopt/model.hpp"

namespace resetopt {

// Sentinel for the regime t < t* where no finite reset boundary exists.
inline constexpr double kInfiniteBoundary = std::numeric_limits<double>::infinity();

struct SolverError : std::runtime_error {
    std::size_t grid_index;
    SolverError(const std::string& what, std::size_t k)
        : std::runtime_error(what + " at grid index " + std::to_string(k)), grid_index(k) {}
};

// Optimal reset boundary sampled on the grid. b(t_N) = strike_ref exactly;
// earlier nodes are > strike_ref or kInfiniteBoundary.
struct BoundaryCurve {
    TimeGrid grid;
    std::vector<double> values;  // size n_steps + 1
    double strike_ref;

    bool is_infinite(std::size_t k) const { return std::isinf(values.at(k)); }

    // Value at the midpoint of [t_l, t_{l+1}]; infinite if either node is.
    double midpoint_value(std::size_t l) const {
        const double a = values[l], b = values[l + 1];
        if (std::isinf(a) || std::isinf(b)) return kInfiniteBoundary;
        return 0.5 * (a + b);
    }

    double interpolate(double t) const {
        if (t < 0.0 || t > grid.maturity)
            throw std::domain_error("BoundaryCurve::interpolate: t outside [0, T]");
        const double dt = grid.delta();
        std::size_t k = static_cast<std::size_t>(t / dt);
        if (k >= grid.n_steps) k = grid.n_steps - 1;
        if (t == grid.node(k + 1)) ++k;  // node exactness despite rounding in t / dt
        const double t_k = grid.node(k);
        const double w = (t - t_k) / dt;
        if (w == 0.0) {
            if (std::isinf(values[k]))
                throw std::domain_error("BoundaryCurve::interpolate: node is infinite");
            return values[k];
        }
        if (std::isinf(values[k]) || std::isinf(values[k + 1]))
            throw std::domain_error("BoundaryCurve::interpolate: bracketing node is infinite");
        return (1.0 - w) * values[k] + w * values[k + 1];
    }
};

// Inputs for one level of the recursion: h_n at quadrature midpoints and the
// multiplier m(t_k) = V^e(t_k) + p_{n-1}(t_k) on the grid nodes.
struct LevelInputs {
    std::vector<double> h_mid;       // h_n(u_l), l = 0..N-1
    std::vector<double> multiplier;  // m(t_k), k = 0..N
    ModelParams params;
};

// Discrete residual of the integral equation at node k:
//   beta m(t_k) - V^e(t_k, beta, K)
//     - Delta sum_{l=k}^{N-1} (-beta) h(u_l) avg_l[e^{-delta(u-t_k)} Qhat(X_u >= b(u))]
// with b linear on each subinterval and the left endpoint of the current
// subinterval set to the candidate beta itself. The h tabulation holds
// subinterval averages of the singular closed-form part (see tabulate_h) and
// the discounted tail probability is averaged by Gauss-Legendre in
// sqrt(u - t): both factors are steep at an endpoint of the integration range
// ((T-u)^{-1/2} at maturity, a (u-t)^{-1/2} derivative layer at u = t) and a
// plain pointwise sum converges too slowly through either.
inline double residual(double beta, std::size_t k, const LevelInputs& inputs,
                       const TimeGrid& grid, const std::vector<double>& later) {
    const double K = inputs.params.strike;
    if (!(beta > K)) throw std::domain_error("residual: beta must exceed the strike");
    const double t_k = grid.node(k);
    const double dt = grid.delta();
    double quad = 0.0;
    for (std::size_t l = k; l < grid.n_steps; ++l) {
        const double b_left = (l == k) ? beta : later[l];
        const double b_right = later[l + 1];
        if (std::isinf(b_left) || std::isinf(b_right)) continue;  // tail prob is 0
        quad += -beta * inputs.h_mid[l] *
                discounted_tail_average(t_k, grid.node(l), grid.node(l + 1), beta, b_left,
                                        b_right, inputs.params,
                                        /*sqrt_shape=*/l + 1 == grid.n_steps);
    }
    return beta * inputs.multiplier[k] - european_put(t_k, beta, K, inputs.params) - dt * quad;
}

// Root of residual(., k) on (K, K exp(8 sigma sqrt(T))]. The residual is
// negative on the continuation branch just above K, crosses zero at the
// boundary, and is zero up to discretization noise in the stopping region
// (the integral equation holds identically above the boundary in the
// continuum), so the root is the FIRST upward sign change. The scan for it
// starts at the previously solved node b(t_{k+1}) -- the boundary decreases
// in t, so the root lies at or above it -- with a step proportional to that
// node's own distance from K; this resolves the crossing at every time scale
// where a fixed scan grid would overshoot the narrow near-maturity window.
// No sign change anywhere means no finite boundary: returns the sentinel.
inline double solve_step(std::size_t k, const LevelInputs& inputs, const TimeGrid& grid,
                         const std::vector<double>& later) {
    const double K = inputs.params.strike;
    const double b_min = K * (1.0 + 1e-9);
    const double b_max = K * std::exp(8.0 * inputs.params.vol * std::sqrt(inputs.params.maturity));
    const double b_next = std::isinf(later[k + 1]) ? b_min : std::max(later[k + 1], b_min);

    double lo = b_next;
    double f_lo = residual(lo, k, inputs, grid, later);
    if (!std::isfinite(f_lo)) throw SolverError("solve_step: residual not finite", k);
    double hi = lo;
    double f_hi = f_lo;
    if (f_lo > 0.0) {
        // root below the previous node (noise-level violation of monotonicity)
        hi = lo;
        f_hi = f_lo;
        lo = b_min;
        f_lo = residual(lo, k, inputs, grid, later);
        if (!std::isfinite(f_lo)) throw SolverError("solve_step: residual not finite", k);
        if (f_lo > 0.0) return kInfiniteBoundary;  // positive all the way down to K
    } else {
        double step = 0.5 * std::max(b_next - K, K * grid.delta());
        bool bracketed = false;
        while (lo < b_max) {
            hi = std::min(lo + step, b_max);
            f_hi = residual(hi, k, inputs, grid, later);
            if (!std::isfinite(f_hi)) throw SolverError("solve_step: residual not finite", k);
            if (f_hi > 0.0) {
                bracketed = true;
                break;
            }
            lo = hi;
            f_lo = f_hi;
            step *= 1.5;
        }
        if (!bracketed) return kInfiniteBoundary;
    }
    const double tol = 1e-10 * K;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid, k, inputs, grid, later);
        if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Backward recursion k = N-1 .. 0 with b(t_N) = K. Once a step has no finite
// root all earlier nodes are infinite as well (the t < t* regime).
inline BoundaryCurve solve_boundary(const LevelInputs& inputs, const TimeGrid& grid) {
    inputs.params.validate();
    if (inputs.h_mid.size() != grid.n_steps || inputs.multiplier.size() != grid.n_steps + 1)
        throw std::invalid_argument("solve_boundary: input tabulations do not match the grid");
    std::vector<double> values(grid.n_steps + 1, kInfiniteBoundary);
    values[grid.n_steps] = inputs.params.strike;
    for (std::size_t k = grid.n_steps; k-- > 0;) {
        const double b = solve_step(k, inputs, grid, values);
        if (std::isinf(b)) break;
        values[k] = b;
    }
    return BoundaryCurve{grid, std::move(values), inputs.params.strike};
}

}  // namespace resetopt
