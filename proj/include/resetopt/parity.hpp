#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "resetopt/model.hpp"

namespace resetopt {

// K e^{-rT} - X_0 e^{-delta T}: the constant linking reset put / shout call
// and shout put / reset call prices at t = 0.
inline double parity_constant(double x0, const ModelParams& p) {
    return p.strike * std::exp(-p.rate * p.maturity) -
           x0 * std::exp(-p.dividend * p.maturity);
}

// t = 0 quote across the four contracts. The put-side pair is only available
// when a reset-call price has been supplied: this artifact solves the
// reset-put ladder only, the rest follow from the static identities.
struct ParityQuote {
    double x0;
    ModelParams params;
    std::optional<double> reset_put;
    std::optional<double> shout_call;
    std::optional<double> shout_put;
    std::optional<double> reset_call;
};

inline ParityQuote from_reset_put(double v_rp, double x0, const ModelParams& p) {
    if (v_rp < 0.0) throw std::domain_error("from_reset_put: price must be >= 0");
    if (!(x0 > 0.0)) throw std::domain_error("from_reset_put: spot must be > 0");
    ParityQuote q{x0, p, v_rp, v_rp - parity_constant(x0, p), std::nullopt, std::nullopt};
    return q;
}

inline double pair_put_side(double v_rc, double x0, const ModelParams& p) {
    if (v_rc < 0.0) throw std::domain_error("pair_put_side: price must be >= 0");
    return v_rc + parity_constant(x0, p);
}

}  // namespace resetopt
