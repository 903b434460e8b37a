#pragma once

#include <cstddef>
#include <stdexcept>

namespace resetopt {

// Uniform partition t_k = k * (T / N), k = 0..N.
struct TimeGrid {
    std::size_t n_steps;
    double maturity;

    TimeGrid(std::size_t n, double T) : n_steps(n), maturity(T) {
        if (n < 2) throw std::invalid_argument("TimeGrid: n_steps must be >= 2");
        if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: maturity must be > 0");
    }

    double delta() const noexcept { return maturity / static_cast<double>(n_steps); }

    double node(std::size_t k) const noexcept {
        return k == n_steps ? maturity : static_cast<double>(k) * delta();
    }

    // Midpoint of subinterval [t_l, t_{l+1}], l = 0..N-1. Never equals T, so
    // quadrature never touches the h-singularity there.
    double midpoint(std::size_t l) const noexcept {
        return (static_cast<double>(l) + 0.5) * delta();
    }

    bool operator==(const TimeGrid&) const = default;
};

}  // namespace resetopt
